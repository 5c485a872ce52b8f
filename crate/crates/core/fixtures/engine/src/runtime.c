#include "runtime.h"

Value newArray(VM* vm, int length) { return allocate(vm, ARRAY, length); }

Value newObject(VM* vm) { return allocate(vm, OBJECT, 0); }

Value createFunction(VM* vm, int index)
{
    Value f = newObject(vm);
    setPrototype(f, vm->functionPrototype);
    return f;
}

Value constructObject(VM* vm, int index)
{
    Value o = newObject(vm);
    return callSlowPath(vm, vm->code + index);
}

Value getByIdSlow(VM* vm, int id) { return lookupProperty(vm->acc, id); }

Value putByIdSlow(VM* vm, int id, Value v) { return storeProperty(vm->acc, id, v); }

Value stringConcat(VM* vm, const char* a, const char* b) { return makeString(vm, a, b); }

Value addSlow(Value a, Value b)
{
    if (isString(a) || isString(b))
        return stringConcat(NULL, toCString(a), toCString(b));
    return arithSlow(a, b, '+');
}

Value arithSlow(Value a, Value b, char op) { return numberValue(op == '+' ? toNumber(a) + toNumber(b) : toNumber(a) * toNumber(b)); }

Value compareSlow(Value a, Value b) { return toNumber(a) < toNumber(b); }

Value typedArrayConstruct(VM* vm, int length) { return newArray(vm, length); }

void printValue(Value v) { fputs(toCString(v), stdout); }
