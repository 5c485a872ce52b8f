/* Toy interpreter loop. Fixture for the naive C extractor. */
#include "runtime.h"

static const char* opcodeNames[] = { "enter", "call", "ret" };

Value interpretEntry(VM* vm, Code* code)
{
    for (;;) {
        switch (code->op) {
        case OP_CALL:
            vm->acc = callSlowPath(vm, code);
            break;
        case OP_GET_BY_ID:
            vm->acc = getByIdSlow(vm, code->operand);
            break;
        case OP_PUT_BY_ID:
            putByIdSlow(vm, code->operand, vm->acc);
            break;
        case OP_ADD:
            vm->acc = addSlow(vm->acc, vm->reg);
            break;
        case OP_MUL:
            vm->acc = arithSlow(vm->acc, vm->reg, '*');
            break;
        case OP_LESS:
            vm->acc = compareSlow(vm->acc, vm->reg);
            break;
        case OP_THROW:
            return throwException(vm, "uncaught (in interpreter)");
        default:
            printValue(vm->acc);
        }
        code++;
    }
}

Value callSlowPath(VM* vm, Code* code)
{
    if (code->flags & CALL_CONSTRUCT)
        return constructObject(vm, code->operand);
    return createFunction(vm, code->operand);
}

Value unwindHandler(VM* vm)
{
    /* A brace in a comment { must not confuse the extractor. */
    return throwException(vm, "unwind }");
}

Value throwException(VM* vm, const char* message)
{
    vm->exception = stringConcat(vm, message, "");
    return JS_EXCEPTION;
}
