#include "stack.h"

void stack_reset(Stack *s) {
    s->top = 0;
}

int stack_push(Stack *s, int v) {
    if (stack_depth(s) >= STACK_SLOTS)
        return 0;
    s->items[s->top] = v;
    s->top++;
    return 1;
}

int stack_pop(Stack *s, int *out) {
    if (stack_depth(s) == 0)
        return 0;
    s->top--;
    *out = s->items[s->top];
    return 1;
}

int stack_depth(const Stack *s) {
    return s->top;
}
