#include <assert.h>
#include "../src/buffer.h"

void test_push(void) {
    Buffer b;
    buffer_init(&b);
    assert(buffer_push(&b, 7));
    assert(buffer_len(&b) == 1);
    for (int i = 0; i < buffer_capacity() - 1; i++)
        assert(buffer_push(&b, i));
    assert(!buffer_push(&b, 99));
}

void test_pop(void) {
    Buffer b;
    int out = 0;
    buffer_init(&b);
    assert(!buffer_pop(&b, &out));
    buffer_push(&b, 1);
    buffer_push(&b, 2);
    assert(buffer_pop(&b, &out) && out == 1);
    assert(buffer_pop(&b, &out) && out == 2);
    assert(buffer_len(&b) == 0);
}
