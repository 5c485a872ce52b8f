#include "bytecompiler.h"

struct LoopLabels {
    int head;
    int exit;
};

void compileProgram(Compiler* c, Node* root)
{
    for (Node* n = root->first; n; n = n->next) {
        if (isLoop(n))
            emitLoopHeader(c, n);
        else if (n->kind == NODE_RETURN)
            emitReturn(c, n);
        else if (n->kind == NODE_BLOCK)
            emitScope(c, n);
        else if (n->kind == NODE_FUNCTION)
            createClosure(c, n);
        else
            emitComma(c, n);
    }
    foldBranch(c, root);
}

void emitLoopHeader(Compiler* c, Node* loop)
{
    struct LoopLabels labels = { newLabel(c), newLabel(c) };
    declareLexical(c, loop->scope);
    emitJump(c, labels.head);
    hoistBoundsCheck(c->graph, loop);
}

void emitReturn(Compiler* c, Node* n)
{
    emitJump(c, c->exitLabel);
}

void emitScope(Compiler* c, Node* block)
{
    declareLexical(c, block->scope);
    declareVar(c, block->scope);
}

void emitComma(Compiler* c, Node* n)
{
    emitExpression(c, n->left);
    emitExpression(c, n->right);
}

void createClosure(Compiler* c, Node* fn)
{
    createFunction(c->vm, fn->index);
}

int isLoop(Node* n)
{
    return n->kind == NODE_FOR || n->kind == NODE_WHILE;
}

void emitJump(Compiler* c, int label) { appendOp(c, OP_JUMP, label); }

void declareLexical(Compiler* c, Scope* s) { appendOp(c, OP_DECLARE, s->lexicals); }

void declareVar(Compiler* c, Scope* s) { appendOp(c, OP_DECLARE, s->vars); }

int newLabel(Compiler* c) { return c->labels++; }
