#include "dfg.h"

void compileOptimized(Graph* g)
{
    for (Block* b = g->blocks; b; b = b->next) {
        if (b->isLoopHeader)
            optimizeLoop(g, b);
    }
    foldBranch(g->compiler, g->root);
}

void optimizeLoop(Graph* g, Block* header)
{
    hoistBoundsCheck(g, header->loop);
}

void hoistBoundsCheck(Graph* g, Node* loop)
{
    Node* check = loop->firstCheck;
    while (check) {
        if (loopInvariant(g, loop, check->index)) {
            insertCheck(g, loop->preheader, check);
            removeCheck(check);
        }
        check = check->next;
    }
}

int loopInvariant(Graph* g, Node* loop, Node* value)
{
    return value->block->depth < loop->depth;
}

void insertCheck(Graph* g, Block* at, Node* check)
{
    appendNode(at, cloneNode(g, check));
}

void foldBranch(Compiler* c, Node* root)
{
    if (root->kind == NODE_IF && isConstant(root->test))
        replaceWith(root, constantValue(root->test) ? root->cons : root->alt);
}
