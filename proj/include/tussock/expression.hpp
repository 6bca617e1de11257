#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tussock/raster.hpp"

namespace tussock {

// Division results are missing (NaN) when |denominator| falls below this.
inline constexpr double kDenominatorGuard = 1e-12;

// Band-arithmetic formula compiled to a postfix program.
//
// Grammar: numbers, band names (B2 ... B12, B8A), named parameters, unary
// minus, + - * / ^ (right associative), parentheses, sqrt(x), abs(x).
// Parameters are folded in at compile time. Missing inputs are NaN and
// propagate; guarded division and sqrt of a negative also yield NaN.
class Expression {
public:
    static Expression compile(std::string_view source,
                              const std::map<std::string, double>& parameters = {});

    // band_values is indexed by band_slot(); only referenced slots are read.
    double evaluate(std::span<const double> band_values) const noexcept;

    const std::string& source() const noexcept { return source_; }
    // Bands referenced by the formula, in first-use order.
    const std::vector<BandId>& bands() const noexcept { return bands_; }

private:
    enum class Op : std::uint8_t { Const, Band, Add, Sub, Mul, Div, Pow, Neg, Sqrt, Abs };
    struct Instr {
        Op op;
        std::uint8_t slot;
        double value;
    };
    static constexpr std::size_t kMaxDepth = 32;

    friend class ExpressionParser;

    std::string source_;
    std::vector<Instr> program_;
    std::vector<BandId> bands_;
};

}  // namespace tussock
