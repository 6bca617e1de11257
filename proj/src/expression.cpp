#include "tussock/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "tussock/errors.hpp"

namespace tussock {

class ExpressionParser {
public:
    ExpressionParser(std::string_view text, const std::map<std::string, double>& params,
                     Expression& out)
        : text_(text), params_(params), out_(out) {}

    void run() {
        parse_sum();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        if (max_depth_ > Expression::kMaxDepth) fail("formula nests too deeply");
    }

private:
    using Op = Expression::Op;

    [[noreturn]] void fail(const std::string& why) const {
        raise(ErrorCode::Configuration, "formula '" + std::string(text_) + "' at offset " +
                                            std::to_string(pos_) + ": " + why);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void emit(Op op, std::uint8_t slot = 0, double value = 0.0) {
        out_.program_.push_back({op, slot, value});
        switch (op) {
        case Op::Const:
        case Op::Band: ++depth_; break;
        case Op::Neg:
        case Op::Sqrt:
        case Op::Abs: break;
        default: --depth_; break;
        }
        max_depth_ = std::max(max_depth_, depth_);
    }

    void parse_sum() {
        parse_product();
        for (;;) {
            if (accept('+')) {
                parse_product();
                emit(Op::Add);
            } else if (accept('-')) {
                parse_product();
                emit(Op::Sub);
            } else {
                return;
            }
        }
    }

    void parse_product() {
        parse_unary();
        for (;;) {
            if (accept('*')) {
                parse_unary();
                emit(Op::Mul);
            } else if (accept('/')) {
                parse_unary();
                emit(Op::Div);
            } else {
                return;
            }
        }
    }

    void parse_unary() {
        if (accept('-')) {
            parse_unary();
            emit(Op::Neg);
            return;
        }
        if (accept('+')) {
            parse_unary();
            return;
        }
        parse_power();
    }

    void parse_power() {
        parse_primary();
        if (accept('^')) {
            parse_unary();
            emit(Op::Pow);
        }
    }

    void parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of formula");
        const char c = text_[pos_];
        if (accept('(')) {
            parse_sum();
            if (!accept(')')) fail("expected ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
            if (ec != std::errc()) fail("bad number");
            pos_ = static_cast<std::size_t>(ptr - text_.data());
            emit(Op::Const, 0, v);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name(text_.substr(start, pos_ - start));
            if (name == "sqrt" || name == "abs") {
                if (!accept('(')) fail("expected '(' after " + name);
                parse_sum();
                if (!accept(')')) fail("expected ')'");
                emit(name == "sqrt" ? Op::Sqrt : Op::Abs);
                return;
            }
            if (auto it = params_.find(name); it != params_.end()) {
                emit(Op::Const, 0, it->second);
                return;
            }
            if (auto band = parse_band(name); band && is_input_band(*band)) {
                emit(Op::Band, static_cast<std::uint8_t>(band_slot(*band)));
                auto& used = out_.bands_;
                if (std::find(used.begin(), used.end(), *band) == used.end()) used.push_back(*band);
                return;
            }
            fail("unknown identifier '" + name + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    const std::map<std::string, double>& params_;
    Expression& out_;
    std::size_t pos_ = 0;
    std::size_t depth_ = 0;
    std::size_t max_depth_ = 0;
};

Expression Expression::compile(std::string_view source,
                               const std::map<std::string, double>& parameters) {
    Expression e;
    e.source_ = std::string(source);
    ExpressionParser(e.source_, parameters, e).run();
    return e;
}

double Expression::evaluate(std::span<const double> band_values) const noexcept {
    std::array<double, kMaxDepth> stack;
    std::size_t top = 0;
    for (const Instr& in : program_) {
        switch (in.op) {
        case Op::Const: stack[top++] = in.value; break;
        case Op::Band: stack[top++] = band_values[in.slot]; break;
        case Op::Add: --top; stack[top - 1] += stack[top]; break;
        case Op::Sub: --top; stack[top - 1] -= stack[top]; break;
        case Op::Mul: --top; stack[top - 1] *= stack[top]; break;
        case Op::Div:
            --top;
            stack[top - 1] = std::fabs(stack[top]) < kDenominatorGuard
                                 ? std::numeric_limits<double>::quiet_NaN()
                                 : stack[top - 1] / stack[top];
            break;
        case Op::Pow: --top; stack[top - 1] = std::pow(stack[top - 1], stack[top]); break;
        case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
        case Op::Sqrt:
            stack[top - 1] = stack[top - 1] < 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                                  : std::sqrt(stack[top - 1]);
            break;
        case Op::Abs: stack[top - 1] = std::fabs(stack[top - 1]); break;
        }
    }
    return top == 1 ? stack[0] : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace tussock
