#include "sac/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "sac/errors.hpp"

namespace sac::algebra {

std::string Homogeneity::str() const {
    std::ostringstream os;
    os << a.str();
    if (b != 0) {
        os << (b > 0 ? " + " : " - ");
        const std::int64_t m = b > 0 ? b : -b;
        if (m != 1) os << m << "*";
        os << "kappa";
    }
    return os.str();
}

int parabolic_length(const MultiIndex& k) { return 2 * k[0] + k[1] + k[2] + k[3]; }

namespace {

bool is_zero(const MultiIndex& k) { return k == MultiIndex{0, 0, 0, 0}; }

int kind_rank(Symbol::Kind k) {
    switch (k) {
        case Symbol::Kind::One: return 0;
        case Symbol::Kind::Xi: return 1;
        case Symbol::Kind::X: return 2;
        case Symbol::Kind::Integ: return 3;
        case Symbol::Kind::Prod: return 4;
    }
    return 5;
}

}  // namespace

int compare(const Symbol& a, const Symbol& b) {
    const int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a.kind()) {
        case Symbol::Kind::One:
        case Symbol::Kind::Xi:
            return 0;
        case Symbol::Kind::X:
            if (a.xindex() == b.xindex()) return 0;
            return a.xindex() < b.xindex() ? -1 : 1;
        case Symbol::Kind::Integ:
            return compare(a.body(), b.body());
        case Symbol::Kind::Prod: {
            const auto& fa = a.factors();
            const auto& fb = b.factors();
            const std::size_t n = std::min(fa.size(), fb.size());
            for (std::size_t i = 0; i < n; ++i) {
                const int c = compare(fa[i], fb[i]);
                if (c != 0) return c;
            }
            if (fa.size() == fb.size()) return 0;
            return fa.size() < fb.size() ? -1 : 1;
        }
    }
    return 0;
}

bool operator==(const Symbol& a, const Symbol& b) { return compare(a, b) == 0; }
bool operator<(const Symbol& a, const Symbol& b) { return compare(a, b) < 0; }

Symbol Symbol::one() { return Symbol(); }

Symbol Symbol::xi() {
    Symbol s;
    s.kind_ = Kind::Xi;
    return s;
}

Symbol Symbol::x(const MultiIndex& k) {
    for (int v : k)
        if (v < 0) throw StructuralError("negative entry in polynomial multi-index");
    if (is_zero(k)) return one();
    Symbol s;
    s.kind_ = Kind::X;
    s.xk_ = k;
    return s;
}

Symbol Symbol::x_coord(int i, int power) {
    if (i < 0 || i > 3) throw StructuralError("coordinate index out of range");
    MultiIndex k{0, 0, 0, 0};
    k[static_cast<std::size_t>(i)] = power;
    return x(k);
}

bool Symbol::is_polynomial() const { return kind_ == Kind::One || kind_ == Kind::X; }

bool Symbol::has_x_factor() const {
    if (kind_ == Kind::X) return true;
    if (kind_ == Kind::Prod)
        return std::any_of(kids_.begin(), kids_.end(),
                           [](const Symbol& f) { return f.kind() == Kind::X; });
    return false;
}

Symbol Symbol::integ(const Symbol& body) {
    if (body.is_polynomial())
        throw StructuralError("I(X^k) is annihilated by the structure; got I(" +
                              to_string(body) + ")");
    Symbol s;
    s.kind_ = Kind::Integ;
    s.kids_.push_back(body);
    return s;
}

Symbol Symbol::prod(std::vector<Symbol> factors) {
    std::vector<Symbol> flat;
    MultiIndex xk{0, 0, 0, 0};
    for (auto& f : factors) {
        switch (f.kind()) {
            case Kind::One:
                break;
            case Kind::X:
                for (int i = 0; i < 4; ++i) xk[static_cast<std::size_t>(i)] += f.xk_[static_cast<std::size_t>(i)];
                break;
            case Kind::Prod:
                for (auto& g : f.kids_) {
                    if (g.kind() == Kind::X)
                        for (int i = 0; i < 4; ++i) xk[static_cast<std::size_t>(i)] += g.xk_[static_cast<std::size_t>(i)];
                    else
                        flat.push_back(g);
                }
                break;
            default:
                flat.push_back(std::move(f));
        }
    }
    if (!is_zero(xk)) flat.push_back(x(xk));
    if (flat.empty()) return one();
    if (flat.size() == 1) return flat.front();
    std::sort(flat.begin(), flat.end());
    Symbol s;
    s.kind_ = Kind::Prod;
    s.kids_ = std::move(flat);
    return s;
}

Symbol Symbol::pow(const Symbol& base, int exponent) {
    if (exponent < 0) throw StructuralError("negative symbol power");
    std::vector<Symbol> fs(static_cast<std::size_t>(exponent), base);
    return prod(std::move(fs));
}

Homogeneity homogeneity(const Symbol& tau, int d) {
    if (d < 1 || d > 3) throw StructuralError("dimension must be in {1,2,3}");
    switch (tau.kind()) {
        case Symbol::Kind::One:
            return {Rational(0), 0};
        case Symbol::Kind::Xi:
            return {Rational(-(d + 2), 2), -1};
        case Symbol::Kind::X: {
            const auto& k = tau.xindex();
            for (int i = d + 1; i < 4; ++i)
                if (k[static_cast<std::size_t>(i)] != 0)
                    throw StructuralError("polynomial index uses coordinate beyond dimension " +
                                          std::to_string(d));
            return {Rational(parabolic_length(k)), 0};
        }
        case Symbol::Kind::Integ:
            return homogeneity(tau.body(), d) + Homogeneity{Rational(2), 0};
        case Symbol::Kind::Prod: {
            Homogeneity h{Rational(0), 0};
            for (const auto& f : tau.factors()) h = h + homogeneity(f, d);
            return h;
        }
    }
    throw StructuralError("unreachable symbol kind");
}

int chaos_order(const Symbol& tau) {
    switch (tau.kind()) {
        case Symbol::Kind::One:
        case Symbol::Kind::X:
            return 0;
        case Symbol::Kind::Xi:
            return 1;
        case Symbol::Kind::Integ:
            return chaos_order(tau.body());
        case Symbol::Kind::Prod: {
            int n = 0;
            for (const auto& f : tau.factors()) n += chaos_order(f);
            return n;
        }
    }
    return 0;
}

bool PlusMonomial::is_unit() const { return is_zero(xk) && js.empty(); }

bool operator<(const PlusMonomial& a, const PlusMonomial& b) {
    if (a.xk != b.xk) return a.xk < b.xk;
    return std::lexicographical_compare(a.js.begin(), a.js.end(), b.js.begin(), b.js.end());
}

PlusMonomial mono_mul(const PlusMonomial& a, const PlusMonomial& b) {
    PlusMonomial m;
    for (int i = 0; i < 4; ++i) m.xk[static_cast<std::size_t>(i)] = a.xk[static_cast<std::size_t>(i)] + b.xk[static_cast<std::size_t>(i)];
    m.js = a.js;
    m.js.insert(m.js.end(), b.js.begin(), b.js.end());
    std::sort(m.js.begin(), m.js.end());
    return m;
}

namespace {

std::vector<CoproductTerm> merge_terms(std::vector<CoproductTerm> terms) {
    std::map<std::pair<Symbol, PlusMonomial>, Rational> acc;
    for (auto& t : terms) {
        auto key = std::make_pair(t.left, t.right);
        auto it = acc.find(key);
        if (it == acc.end())
            acc.emplace(std::move(key), t.coeff);
        else
            it->second = it->second + t.coeff;
    }
    std::vector<CoproductTerm> out;
    out.reserve(acc.size());
    for (auto& [key, c] : acc)
        if (c != Rational(0)) out.push_back({c, key.first, key.second});
    return out;
}

std::vector<CoproductTerm> coproduct_mul(const std::vector<CoproductTerm>& a,
                                         const std::vector<CoproductTerm>& b) {
    std::vector<CoproductTerm> out;
    out.reserve(a.size() * b.size());
    for (const auto& ta : a)
        for (const auto& tb : b)
            out.push_back({ta.coeff * tb.coeff, Symbol::prod({ta.left, tb.left}),
                           mono_mul(ta.right, tb.right)});
    return merge_terms(std::move(out));
}

std::int64_t factorial(int n) {
    std::int64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

std::int64_t multi_factorial(const MultiIndex& k) {
    std::int64_t f = 1;
    for (int v : k) f *= factorial(v);
    return f;
}

/// All multi-indices over d+1 coordinates with parabolic length strictly
/// below the given exact bound.
std::vector<MultiIndex> multi_indices_below(int d, const Homogeneity& bound) {
    std::vector<MultiIndex> out;
    if (Homogeneity{Rational(0), 0} >= bound) return out;
    // parabolic length is an integer, so |k| < bound iff |k| <= ceil-ish cap
    int cap = 0;
    while (Homogeneity{Rational(cap + 1), 0} < bound) ++cap;
    for (int k0 = 0; 2 * k0 <= cap; ++k0)
        for (int k1 = 0; 2 * k0 + k1 <= cap; ++k1)
            for (int k2 = 0; d >= 2 ? 2 * k0 + k1 + k2 <= cap : k2 == 0; ++k2)
                for (int k3 = 0; d >= 3 ? 2 * k0 + k1 + k2 + k3 <= cap : k3 == 0; ++k3) {
                    MultiIndex k{k0, k1, k2, k3};
                    if (Homogeneity{Rational(parabolic_length(k)), 0} < bound)
                        out.push_back(k);
                }
    return out;
}

std::vector<MultiIndex> splits_of(const MultiIndex& k) {
    std::vector<MultiIndex> out;
    for (int l0 = 0; l0 <= k[0]; ++l0)
        for (int l1 = 0; l1 <= k[1]; ++l1)
            for (int l2 = 0; l2 <= k[2]; ++l2)
                for (int l3 = 0; l3 <= k[3]; ++l3) out.push_back({l0, l1, l2, l3});
    return out;
}

}  // namespace

std::vector<CoproductTerm> coproduct(const Symbol& tau, int d) {
    switch (tau.kind()) {
        case Symbol::Kind::One:
            return {{Rational(1), Symbol::one(), PlusMonomial{}}};
        case Symbol::Kind::Xi:
            return {{Rational(1), Symbol::xi(), PlusMonomial{}}};
        case Symbol::Kind::X: {
            // Multiplicative extension of D X_i = X_i (x) One + One (x) X_i:
            // D X^k = sum_{l <= k} (k choose l) X^l (x) X^{k-l}.
            std::vector<CoproductTerm> out;
            const auto& k = tau.xindex();
            for (const auto& l : splits_of(k)) {
                MultiIndex m;
                for (int i = 0; i < 4; ++i) m[static_cast<std::size_t>(i)] = k[static_cast<std::size_t>(i)] - l[static_cast<std::size_t>(i)];
                Rational binom(multi_factorial(k), multi_factorial(l) * multi_factorial(m));
                PlusMonomial right;
                right.xk = m;
                out.push_back({binom, Symbol::x(l), right});
            }
            return merge_terms(std::move(out));
        }
        case Symbol::Kind::Prod: {
            std::vector<CoproductTerm> acc = {{Rational(1), Symbol::one(), PlusMonomial{}}};
            for (const auto& f : tau.factors()) acc = coproduct_mul(acc, coproduct(f, d));
            return acc;
        }
        case Symbol::Kind::Integ: {
            const Symbol& body = tau.body();
            std::vector<CoproductTerm> out;
            for (const auto& t : coproduct(body, d)) {
                if (t.left.is_polynomial()) continue;  // I kills polynomials
                out.push_back({t.coeff, Symbol::integ(t.left), t.right});
            }
            const Homogeneity bound = homogeneity(body, d) + Homogeneity{Rational(2), 0};
            for (const auto& k : multi_indices_below(d, bound)) {
                JGenerator j{k, body};
                for (const auto& l : splits_of(k)) {
                    MultiIndex m;
                    for (int i = 0; i < 4; ++i) m[static_cast<std::size_t>(i)] = k[static_cast<std::size_t>(i)] - l[static_cast<std::size_t>(i)];
                    PlusMonomial right;
                    right.xk = m;
                    right.js = {j};
                    out.push_back({Rational(1, multi_factorial(l) * multi_factorial(m)),
                                   Symbol::x(l), right});
                }
            }
            auto merged = merge_terms(std::move(out));
            std::sort(merged.begin(), merged.end(), [](const CoproductTerm& x, const CoproductTerm& y) {
                if (x.left != y.left) return x.left < y.left;
                return x.right < y.right;
            });
            return merged;
        }
    }
    throw StructuralError("unreachable symbol kind");
}

SymbolSets generate_symbols(int d, const Homogeneity& zeta) {
    if (d < 1 || d > 3) throw StructuralError("dimension must be in {1,2,3}");
    if (zeta < Homogeneity{Rational(2), 0})
        throw StructuralError("truncation level must satisfy zeta >= 2");

    SymbolSets sets;
    sets.d = d;
    sets.zeta = zeta;

    const auto below = [&](const Symbol& s) { return homogeneity(s, d) < zeta; };

    std::set<Symbol> u;
    u.insert(Symbol::one());
    for (int i = 0; i <= d; ++i)
        if (below(Symbol::x_coord(i))) u.insert(Symbol::x_coord(i));
    u.insert(Symbol::integ(Symbol::xi()));

    // Closure under tau_1, tau_2, tau_3 in U  =>  I(tau_1 tau_2 tau_3) in U.
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Symbol> cur(u.begin(), u.end());
        const std::size_t n = cur.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                for (std::size_t l = j; l < n; ++l) {
                    Symbol p = Symbol::prod({cur[i], cur[j], cur[l]});
                    if (p.is_polynomial()) continue;
                    Symbol ip = Symbol::integ(p);
                    if (!below(ip)) continue;
                    if (u.insert(ip).second) grew = true;
                }
    }

    std::set<Symbol> w;
    w.insert(Symbol::xi());
    {
        std::vector<Symbol> cur(u.begin(), u.end());
        const std::size_t n = cur.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                for (std::size_t l = j; l < n; ++l) {
                    Symbol p = Symbol::prod({cur[i], cur[j], cur[l]});
                    if (below(p)) w.insert(p);
                }
    }

    sets.U.assign(u.begin(), u.end());
    sets.W.assign(w.begin(), w.end());

    const Homogeneity zero{Rational(0), 0};
    for (const auto& s : sets.W)
        if (homogeneity(s, d) < zero && !s.has_x_factor()) sets.W_minus.push_back(s);

    for (int i = 0; i <= d; ++i) sets.W_plus_x.push_back(Symbol::x_coord(i));
    for (const auto& s : sets.W) {
        const Homogeneity bound = homogeneity(s, d) + Homogeneity{Rational(2), 0};
        for (const auto& k : multi_indices_below(d, bound))
            sets.W_plus_j.push_back({k, s});
    }
    std::sort(sets.W_plus_j.begin(), sets.W_plus_j.end());

    // Order every listing by (homogeneity, structural order) so goldens are
    // stable and human-readable.
    const auto by_hom = [&](const Symbol& x, const Symbol& y) {
        const Homogeneity hx = homogeneity(x, d), hy = homogeneity(y, d);
        if (hx != hy) return hx < hy;
        return x < y;
    };
    std::sort(sets.U.begin(), sets.U.end(), by_hom);
    std::sort(sets.W.begin(), sets.W.end(), by_hom);
    std::sort(sets.W_minus.begin(), sets.W_minus.end(), by_hom);
    return sets;
}

namespace {

void print_factor(std::ostringstream& os, const Symbol& s);

void print_x(std::ostringstream& os, const MultiIndex& k) {
    bool first = true;
    for (int i = 0; i < 4; ++i) {
        const int p = k[static_cast<std::size_t>(i)];
        if (p == 0) continue;
        if (!first) os << "*";
        first = false;
        os << "X" << i;
        if (p > 1) os << "^" << p;
    }
}

void print_product(std::ostringstream& os, const std::vector<Symbol>& factors) {
    bool first = true;
    std::size_t i = 0;
    while (i < factors.size()) {
        std::size_t j = i;
        while (j < factors.size() && factors[j] == factors[i]) ++j;
        if (!first) os << "*";
        first = false;
        if (factors[i].kind() == Symbol::Kind::X) {
            print_x(os, factors[i].xindex());  // never repeated: merged at build
            i = j;
            continue;
        }
        print_factor(os, factors[i]);
        if (j - i > 1) os << "^" << (j - i);
        i = j;
    }
}

void print_factor(std::ostringstream& os, const Symbol& s) {
    switch (s.kind()) {
        case Symbol::Kind::One: os << "One"; break;
        case Symbol::Kind::Xi: os << "Xi"; break;
        case Symbol::Kind::X: print_x(os, s.xindex()); break;
        case Symbol::Kind::Integ:
            os << "I(";
            print_factor(os, s.body());
            if (s.body().kind() == Symbol::Kind::Prod) {
                // print_factor on Prod handles itself below
            }
            os << ")";
            break;
        case Symbol::Kind::Prod: print_product(os, s.factors()); break;
    }
}

struct Parser {
    const std::string& s;
    std::size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw StructuralError("symbol parse error at position " + std::to_string(pos) + ": " + what);
    }

    int parse_int() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) fail("expected integer");
        return std::stoi(s.substr(start, pos - start));
    }

    Symbol parse_atom() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of input");
        if (s.compare(pos, 3, "One") == 0) { pos += 3; return Symbol::one(); }
        if (s.compare(pos, 2, "Xi") == 0) { pos += 2; return Symbol::xi(); }
        if (s[pos] == 'I') {
            ++pos;
            if (!eat('(')) fail("expected '(' after I");
            Symbol body = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return Symbol::integ(body);
        }
        if (s[pos] == 'X') {
            ++pos;
            const int coord = parse_int();
            if (coord < 0 || coord > 3) fail("coordinate index out of range");
            return Symbol::x_coord(coord);
        }
        if (s[pos] == '(') {
            ++pos;
            Symbol inner = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        fail(std::string("unexpected character '") + s[pos] + "'");
    }

    Symbol parse_term() {
        Symbol base = parse_atom();
        if (eat('^')) {
            const int p = parse_int();
            return Symbol::pow(base, p);
        }
        return base;
    }

    Symbol parse_expr() {
        std::vector<Symbol> factors;
        factors.push_back(parse_term());
        while (eat('*')) factors.push_back(parse_term());
        return Symbol::prod(std::move(factors));
    }
};

}  // namespace

std::string to_string(const Symbol& s) {
    std::ostringstream os;
    print_factor(os, s);
    return os.str();
}

Symbol parse_symbol(const std::string& text) {
    Parser p(text);
    Symbol s = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return s;
}

std::string to_string(const PlusMonomial& m) {
    if (m.is_unit()) return "One";
    std::ostringstream os;
    bool first = true;
    if (m.xk != MultiIndex{0, 0, 0, 0}) {
        print_x(os, m.xk);
        first = false;
    }
    std::size_t i = 0;
    while (i < m.js.size()) {
        std::size_t j = i;
        while (j < m.js.size() && m.js[j] == m.js[i]) ++j;
        if (!first) os << "*";
        first = false;
        const auto& g = m.js[i];
        os << "J";
        if (!is_zero(g.k)) {
            os << "[" << g.k[0] << "," << g.k[1];
            if (g.k[2] || g.k[3]) os << "," << g.k[2];
            if (g.k[3]) os << "," << g.k[3];
            os << "]";
        }
        os << "(" << to_string(g.tau) << ")";
        if (j - i > 1) os << "^" << (j - i);
        i = j;
    }
    return os.str();
}

std::string to_string(const CoproductTerm& t) {
    std::ostringstream os;
    if (t.coeff != Rational(1)) os << t.coeff.str() << " ";
    os << to_string(t.left) << " (x) " << to_string(t.right);
    return os.str();
}

}  // namespace sac::algebra
