#include <assert.h>
#include "../src/parser.h"

void test_parse_number(void) {
    assert(parse_eval("42") == 42);
    assert(parse_eval("0") == 0);
    assert(parse_eval("1 + 2 + 3") == 6);
}

void test_parse_nested(void) {
    assert(parse_eval("(1 + 2) * 3") == 9);
    assert(parse_eval("2 * (3 + (4 * 5))") == 46);
    assert(parse_eval("((7))") == 7);
}
