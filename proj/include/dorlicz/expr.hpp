#pragma once

#include <functional>
#include <string>

namespace dorlicz {

/// Compiles an arithmetic expression in the single variable `t`.
/// Grammar: + - * / ^ (right associative), unary minus, parentheses,
/// numeric literals, and the functions exp, log, sqrt. Throws ConfigError
/// with the character offset on malformed input.
std::function<double(double)> compile_expression(const std::string& text);

}  // namespace dorlicz
