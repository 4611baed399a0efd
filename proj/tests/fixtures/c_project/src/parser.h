#ifndef PARSER_H
#define PARSER_H

/* Recursive-descent evaluator for integer expressions with +, *, and
 * parentheses. parse_expr/parse_term/parse_factor are mutually recursive. */

long parse_expr(const char *s, int *pos);
long parse_term(const char *s, int *pos);
long parse_factor(const char *s, int *pos);
long parse_eval(const char *s);

#endif
