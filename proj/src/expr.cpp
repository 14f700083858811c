#include "dorlicz/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>

#include "dorlicz/error.hpp"

namespace dorlicz {
namespace {

struct Node {
    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt } op = Op::Const;
    double value = 0.0;
    std::shared_ptr<const Node> lhs, rhs;

    double eval(double t) const {
        switch (op) {
            case Op::Const: return value;
            case Op::Var: return t;
            case Op::Add: return lhs->eval(t) + rhs->eval(t);
            case Op::Sub: return lhs->eval(t) - rhs->eval(t);
            case Op::Mul: return lhs->eval(t) * rhs->eval(t);
            case Op::Div: return lhs->eval(t) / rhs->eval(t);
            case Op::Pow: return std::pow(lhs->eval(t), rhs->eval(t));
            case Op::Neg: return -lhs->eval(t);
            case Op::Exp: return std::exp(lhs->eval(t));
            case Op::Log: return std::log(lhs->eval(t));
            case Op::Sqrt: return std::sqrt(lhs->eval(t));
        }
        return NAN;
    }
};

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    n->value = v;
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    NodePtr parse() {
        auto e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        auto lhs = term();
        while (true) {
            if (accept('+')) lhs = make(Node::Op::Add, lhs, term());
            else if (accept('-')) lhs = make(Node::Op::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        auto lhs = unary();
        while (true) {
            if (accept('*')) lhs = make(Node::Op::Mul, lhs, unary());
            else if (accept('/')) lhs = make(Node::Op::Div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Op::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    // The exponent may carry its own sign: t^-1.
    NodePtr power() {
        auto base = primary();
        if (accept('^')) return make(Node::Op::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = expr();
            if (!accept(')')) fail("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            return make(Node::Op::Const, nullptr, nullptr, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "t") return make(Node::Op::Var);
            Node::Op op;
            if (name == "exp") op = Node::Op::Exp;
            else if (name == "log") op = Node::Op::Log;
            else if (name == "sqrt") op = Node::Op::Sqrt;
            else {
                pos_ = start;
                fail("unknown identifier '" + name + "'");
            }
            if (!accept('(')) fail("expected '(' after " + name);
            auto arg = expr();
            if (!accept(')')) fail("missing ')'");
            return make(op, arg);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

std::function<double(double)> compile_expression(const std::string& text) {
    NodePtr root = Parser(text).parse();
    return [root](double t) { return root->eval(t); };
}

}  // namespace dorlicz
