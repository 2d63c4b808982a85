#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sac/rational.hpp"

namespace sac::algebra {

/// Graded degree of a symbol, kept exact as a + b*kappa with kappa an
/// infinitesimally small positive regularity loss. Comparison is the
/// kappa -> 0+ lexicographic order.
struct Homogeneity {
    Rational a;          // kappa-free part
    std::int64_t b = 0;  // coefficient of kappa

    friend Homogeneity operator+(const Homogeneity& x, const Homogeneity& y) {
        return {x.a + y.a, x.b + y.b};
    }
    friend Homogeneity operator-(const Homogeneity& x, const Homogeneity& y) {
        return {x.a - y.a, x.b - y.b};
    }
    friend bool operator==(const Homogeneity& x, const Homogeneity& y) {
        return x.a == y.a && x.b == y.b;
    }
    friend bool operator!=(const Homogeneity& x, const Homogeneity& y) { return !(x == y); }
    friend bool operator<(const Homogeneity& x, const Homogeneity& y) {
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    }
    friend bool operator<=(const Homogeneity& x, const Homogeneity& y) { return x < y || x == y; }
    friend bool operator>(const Homogeneity& x, const Homogeneity& y) { return y < x; }
    friend bool operator>=(const Homogeneity& x, const Homogeneity& y) { return y <= x; }

    std::string str() const;
};

/// Multi-index over the d+1 space-time coordinates (entry 0 is time).
using MultiIndex = std::array<int, 4>;

int parabolic_length(const MultiIndex& k);  // 2*k0 + k1 + k2 + k3

/// A formal tree expression. Canonical form is enforced by the factory
/// functions: products are flattened, polynomial factors merged into a
/// single multi-index, factors sorted by a structural total order, and
/// degenerate cases collapsed (empty product -> One, X^0 -> One).
class Symbol {
  public:
    enum class Kind { One, Xi, X, Integ, Prod };

    static Symbol one();
    static Symbol xi();
    static Symbol x(const MultiIndex& k);
    static Symbol x_coord(int i, int power = 1);
    /// Abstract heat integration I(tau). Rejects pure polynomials: the
    /// structure postulates I(X^k) = 0.
    static Symbol integ(const Symbol& body);
    static Symbol prod(std::vector<Symbol> factors);
    static Symbol pow(const Symbol& base, int exponent);

    Kind kind() const { return kind_; }
    const MultiIndex& xindex() const { return xk_; }        // Kind::X only
    const Symbol& body() const { return kids_.front(); }    // Kind::Integ only
    const std::vector<Symbol>& factors() const { return kids_; }  // Kind::Prod only

    /// True if the symbol is One or a pure polynomial X^k.
    bool is_polynomial() const;
    /// True if an X factor appears at the top level (X itself or a product
    /// containing one).
    bool has_x_factor() const;

    friend bool operator==(const Symbol& a, const Symbol& b);
    friend bool operator!=(const Symbol& a, const Symbol& b) { return !(a == b); }
    friend bool operator<(const Symbol& a, const Symbol& b);  // structural total order

  private:
    Symbol() = default;
    Kind kind_ = Kind::One;
    MultiIndex xk_{0, 0, 0, 0};
    std::vector<Symbol> kids_;
};

int compare(const Symbol& a, const Symbol& b);

/// Exact homogeneity: |Xi| = -(d+2)/2 - kappa, |X_0| = 2, |X_i| = 1,
/// |I(tau)| = |tau| + 2, products add.
Homogeneity homogeneity(const Symbol& tau, int d);

/// Number of Xi leaves (the Wiener-chaos order of the associated field).
int chaos_order(const Symbol& tau);

/// One generator J_k(tau) of the positive-order algebra.
struct JGenerator {
    MultiIndex k{0, 0, 0, 0};
    Symbol tau = Symbol::one();

    friend bool operator==(const JGenerator& a, const JGenerator& b) {
        return a.k == b.k && a.tau == b.tau;
    }
    friend bool operator<(const JGenerator& a, const JGenerator& b) {
        if (a.tau != b.tau) return a.tau < b.tau;
        return a.k < b.k;
    }
};

/// Monomial in the free commutative algebra generated by {X_i} and {J_k(tau)}.
struct PlusMonomial {
    MultiIndex xk{0, 0, 0, 0};
    std::vector<JGenerator> js;  // sorted

    bool is_unit() const;
    friend bool operator==(const PlusMonomial& a, const PlusMonomial& b) {
        return a.xk == b.xk && a.js == b.js;
    }
    friend bool operator<(const PlusMonomial& a, const PlusMonomial& b);
};

PlusMonomial mono_mul(const PlusMonomial& a, const PlusMonomial& b);

/// One term  coeff * (left tensor right)  of a coproduct expansion.
struct CoproductTerm {
    Rational coeff;
    Symbol left = Symbol::one();
    PlusMonomial right;
};

/// Coproduct on the truncated structure:
///   D One = One(x)One, D Xi = Xi(x)One, D X_i = X_i(x)One + One(x)X_i,
///   multiplicative on products, and on I(tau) the usual Taylor correction
///   with J_k(tau) = 0 whenever |tau| + 2 <= |k| (exact comparison).
/// Terms are merged and returned sorted with exact rational coefficients.
std::vector<CoproductTerm> coproduct(const Symbol& tau, int d);

/// Generated symbol sets truncated at homogeneity < zeta.
struct SymbolSets {
    int d = 0;
    Homogeneity zeta;
    std::vector<Symbol> U;        // One, X, I(Xi), closed under I(t1 t2 t3)
    std::vector<Symbol> W;        // {Xi} plus triple products of U
    std::vector<Symbol> W_minus;  // negative homogeneity, no X factor
    std::vector<Symbol> W_plus_x;        // X_0..X_d generators
    std::vector<JGenerator> W_plus_j;    // J_k(tau) generators, |tau|+2 > |k|
};

SymbolSets generate_symbols(int d, const Homogeneity& zeta = Homogeneity{Rational(2), 0});

/// Plain-text tree syntax: `One`, `Xi`, `X0`..`X3`, `I(expr)`, products with
/// `*`, powers with `^` (e.g. `I(Xi)^3`, `X0^2*I(Xi)`). parse(print(s)) == s
/// for every canonical s.
std::string to_string(const Symbol& s);
Symbol parse_symbol(const std::string& text);

std::string to_string(const PlusMonomial& m);
std::string to_string(const CoproductTerm& t);

}  // namespace sac::algebra
