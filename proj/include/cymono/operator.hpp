#pragma once

#include <array>
#include <map>
#include <cstring>
#include <sstream>
#include <string>

#include "cymono/qpoly.hpp"

namespace cymono {

enum class OpForm { theta, dz };

/// Fourth-order linear differential operator on P^1 with exact rational
/// polynomial coefficients, either sum a_i(z) theta^i or sum a_i(z) (d/dz)^i.
struct DifferentialOperator {
    std::array<QPoly, 5> coeffs;
    OpForm form = OpForm::theta;
    std::string name;

    const QPoly& leading() const { return coeffs[4]; }
};

struct ParseError : std::runtime_error {
    size_t position;
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

namespace opdetail {

/// Operators in the normal form sum_k z^k P_k(theta), k possibly negative.
/// Multiplication uses z^a P(theta) * z^b Q(theta) = z^(a+b) P(theta+b) Q(theta).
struct ThetaNormal {
    std::map<long, QPoly> terms;  // z-power -> polynomial in theta

    void add_term(long k, const QPoly& p) {
        if (p.is_zero()) return;
        auto& slot = terms[k];
        slot += p;
        if (slot.is_zero()) terms.erase(k);
    }
    static ThetaNormal constant(const Rat& c) {
        ThetaNormal t;
        t.add_term(0, QPoly::constant(c));
        return t;
    }
    static ThetaNormal z() {
        ThetaNormal t;
        t.add_term(1, QPoly::constant(Rat(1)));
        return t;
    }
    static ThetaNormal theta() {
        ThetaNormal t;
        t.add_term(0, QPoly::x());
        return t;
    }
    /// d/dz = z^-1 theta.
    static ThetaNormal dz() {
        ThetaNormal t;
        t.add_term(-1, QPoly::x());
        return t;
    }

    ThetaNormal& operator+=(const ThetaNormal& o) {
        for (const auto& [k, p] : o.terms) add_term(k, p);
        return *this;
    }
    ThetaNormal& operator-=(const ThetaNormal& o) {
        for (const auto& [k, p] : o.terms) add_term(k, -p);
        return *this;
    }
    friend ThetaNormal operator*(const ThetaNormal& a, const ThetaNormal& b) {
        ThetaNormal out;
        for (const auto& [ka, pa] : a.terms)
            for (const auto& [kb, pb] : b.terms) {
                QPoly shifted = pa.shift(Rat(kb));  // P(theta + kb)
                out.add_term(ka + kb, shifted * pb);
            }
        return out;
    }
    ThetaNormal pow(unsigned long e) const {
        ThetaNormal acc = constant(Rat(1));
        ThetaNormal base = *this;
        while (e) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }
    bool is_constant(Rat& out) const {
        if (terms.empty()) {
            out = 0;
            return true;
        }
        if (terms.size() == 1) {
            auto it = terms.begin();
            if (it->first == 0 && it->second.degree() == 0) {
                out = it->second.coeff(0);
                return true;
            }
        }
        return false;
    }
    int theta_degree() const {
        int d = -1;
        for (const auto& [k, p] : terms) d = std::max(d, p.degree());
        return d;
    }
    long min_z_power() const {
        long m = 0;
        for (const auto& [k, p] : terms) m = std::min(m, k);
        return m;
    }
};

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    ThetaNormal parse() {
        ThetaNormal e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    ThetaNormal expr() {
        ThetaNormal acc;
        bool neg = false;
        if (eat('+')) {
        } else if (eat('-')) {
            neg = true;
        }
        ThetaNormal t = term();
        if (neg) {
            ThetaNormal zero;
            zero -= t;
            t = zero;
        }
        acc += t;
        while (true) {
            if (eat('+')) {
                acc += term();
            } else if (eat('-')) {
                acc -= term();
            } else {
                break;
            }
        }
        return acc;
    }

    ThetaNormal term() {
        ThetaNormal acc = power();
        while (true) {
            if (eat('*')) {
                acc = acc * power();
            } else if (eat('/')) {
                size_t at = pos_;
                ThetaNormal d = power();
                Rat c;
                if (!d.is_constant(c) || c == 0)
                    throw ParseError("division only by nonzero constants", at);
                acc = acc * ThetaNormal::constant(Rat(1) / c);
            } else if (peek() == '(') {
                acc = acc * power();  // juxtaposition: 2(theta+1)
            } else {
                break;
            }
        }
        return acc;
    }

    ThetaNormal power() {
        ThetaNormal base = atom();
        if (eat('^')) {
            size_t at = pos_;
            skip_ws();
            bool neg = eat('-');
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                throw ParseError("expected integer exponent", pos_);
            unsigned long e = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                e = e * 10 + (s_[pos_++] - '0');
            if (neg) {
                Rat c;
                if (!base.is_constant(c) || c == 0)
                    throw ParseError("negative exponent only on nonzero constants", at);
                Rat inv = Rat(1) / c;
                ThetaNormal acc = ThetaNormal::constant(1);
                for (unsigned long i = 0; i < e; ++i) acc = acc * ThetaNormal::constant(inv);
                return acc;
            }
            return base.pow(e);
        }
        return base;
    }

    ThetaNormal atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '(') {
            size_t open = pos_;
            ++pos_;
            ThetaNormal e = expr();
            if (!eat(')')) throw ParseError("unclosed parenthesis", open);
            return e;
        }
        if (c == '-') {
            ++pos_;
            ThetaNormal zero;
            zero -= power();
            return zero;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Int n = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                n = n * 10 + (s_[pos_++] - '0');
            return ThetaNormal::constant(Rat(n));
        }
        if (match_word("theta")) return ThetaNormal::theta();
        if (c == 'z') {
            ++pos_;
            return ThetaNormal::z();
        }
        if (c == 'D') {
            ++pos_;
            return ThetaNormal::dz();
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    bool match_word(const char* w) {
        size_t n = std::strlen(w);
        if (s_.compare(pos_, n, w) == 0) {
            pos_ += n;
            return true;
        }
        return false;
    }
};

/// Stirling numbers of the second kind, up to n = 4:
/// theta^i = sum_j S(i,j) z^j D^j.
inline const int kStirling2[5][5] = {{1, 0, 0, 0, 0},
                                     {0, 1, 0, 0, 0},
                                     {0, 1, 1, 0, 0},
                                     {0, 1, 3, 1, 0},
                                     {0, 1, 7, 6, 1}};

}  // namespace opdetail

/// Divide all five coefficients by their common polynomial gcd and content.
inline DifferentialOperator clear_common_factors(DifferentialOperator op) {
    QPoly g;
    for (const auto& p : op.coeffs)
        if (!p.is_zero()) g = g.is_zero() ? p : poly_gcd(g, p);
    if (g.degree() >= 1) {
        for (auto& p : op.coeffs) {
            if (p.is_zero()) continue;
            auto [q, r] = divrem(p, g);
            if (!r.is_zero()) throw std::logic_error("gcd division");
            p = q;
        }
    }
    Rat cont;
    bool first = true;
    for (const auto& p : op.coeffs) {
        if (p.is_zero()) continue;
        Rat c = content(p);
        if (first) {
            cont = c;
            first = false;
        } else {
            Rat num(gcd(numerator(cont) * denominator(c), numerator(c) * denominator(cont)),
                    denominator(cont) * denominator(c));
            cont = num;
        }
    }
    if (!first && cont != 0) {
        if (op.coeffs[4].lead() < 0) cont = -cont;
        for (auto& p : op.coeffs)
            for (auto& v : p.c) v /= cont;
    }
    return op;
}

namespace opdetail {

inline DifferentialOperator from_normal(const ThetaNormal& n, OpForm target,
                                        const std::string& name) {
    DifferentialOperator op;
    op.form = target;
    op.name = name;
    int tdeg = n.theta_degree();
    if (tdeg != 4) throw std::runtime_error("unsupported order: degree in theta is " +
                                            std::to_string(tdeg) + ", expected 4");
    if (target == OpForm::theta) {
        // normalize so the lowest z-power present is exactly 0
        long minp = n.terms.empty() ? 0 : n.terms.begin()->first;
        for (const auto& [k, p] : n.terms) minp = std::min(minp, k);
        long shift = -minp;
        for (const auto& [k, p] : n.terms)
            for (int i = 0; i <= p.degree(); ++i) {
                if (p.coeff(i) == 0) continue;
                size_t zp = static_cast<size_t>(k + shift);
                QPoly mono = QPoly::constant(p.coeff(i)).times_x_power(zp);
                op.coeffs[i] += mono;
            }
    } else {
        // expand theta^i into Stirling-weighted z^j D^j
        long min_pow = 0;
        std::map<int, std::map<long, Rat>> acc;  // j -> (z-power -> coeff)
        for (const auto& [k, p] : n.terms)
            for (int i = 0; i <= p.degree(); ++i) {
                if (p.coeff(i) == 0) continue;
                if (i == 0) {
                    acc[0][k] += p.coeff(i);
                    min_pow = std::min(min_pow, k);
                    continue;
                }
                for (int j = 1; j <= i; ++j) {
                    if (kStirling2[i][j] == 0) continue;
                    acc[j][k + j] += p.coeff(i) * kStirling2[i][j];
                    min_pow = std::min(min_pow, k + j);
                }
            }
        long shift = min_pow < 0 ? -min_pow : 0;  // only clear negative powers
        for (auto& [j, m] : acc)
            for (auto& [zp, c] : m) {
                if (c == 0) continue;
                op.coeffs[j] += QPoly::constant(c).times_x_power(static_cast<size_t>(zp + shift));
            }
    }
    for (auto& p : op.coeffs) p.trim();
    if (op.coeffs[4].is_zero()) throw std::runtime_error("leading coefficient vanishes");
    return op;
}

inline ThetaNormal to_normal(const DifferentialOperator& op) {
    ThetaNormal n;
    if (op.form == OpForm::theta) {
        for (int i = 0; i <= 4; ++i)
            for (int k = 0; k <= op.coeffs[i].degree(); ++k) {
                if (op.coeffs[i].coeff(k) == 0) continue;
                n.add_term(k, QPoly::constant(op.coeffs[i].coeff(k)).times_x_power(i));
            }
    } else {
        for (int i = 0; i <= 4; ++i) {
            QPoly ff = falling_factorial<Rat>(i);  // z^i D^i = theta(theta-1)...
            for (int k = 0; k <= op.coeffs[i].degree(); ++k) {
                if (op.coeffs[i].coeff(k) == 0) continue;
                n.add_term(k - i, op.coeffs[i].coeff(k) * ff);
            }
        }
    }
    return n;
}

}  // namespace opdetail

/// Parse an operator expression in z, theta (or D for d/dz).  The result is
/// stored in theta form when the text uses theta, dz form when it uses D.
inline DifferentialOperator parse_operator(const std::string& text,
                                           const std::string& name = "") {
    bool uses_d = false;
    for (size_t i = 0; i < text.size(); ++i)
        if (text[i] == 'D') uses_d = true;
    opdetail::Parser parser(text);
    opdetail::ThetaNormal n = parser.parse();
    return opdetail::from_normal(n, uses_d ? OpForm::dz : OpForm::theta, name);
}

/// Rewrite between theta and d/dz forms; the solution space is unchanged
/// (the conversion may multiply by an overall power of z).
inline DifferentialOperator convert_form(const DifferentialOperator& op, OpForm target) {
    if (op.form == target) return op;
    return opdetail::from_normal(opdetail::to_normal(op), target, op.name);
}

/// Coefficients of the d/dz form (converting if necessary).
inline std::array<QPoly, 5> dz_coeffs(const DifferentialOperator& op) {
    if (op.form == OpForm::dz) return op.coeffs;
    return convert_form(op, OpForm::dz).coeffs;
}

/// Operator in the coordinate w = 1/z, in theta_w form (used at infinity):
/// theta_z = -theta_w.
inline DifferentialOperator infinity_form(const DifferentialOperator& op) {
    opdetail::ThetaNormal n = opdetail::to_normal(op);
    long maxk = 0;
    for (const auto& [k, p] : n.terms) maxk = std::max(maxk, k);
    opdetail::ThetaNormal flipped;
    for (const auto& [k, p] : n.terms) {
        // P(theta_z) = P(-theta_w)
        QPoly q = p;
        for (size_t i = 1; i < q.c.size(); i += 2) q.c[i] = -q.c[i];
        flipped.add_term(maxk - k, q);
    }
    DifferentialOperator out = opdetail::from_normal(flipped, OpForm::theta, op.name + "@inf");
    return clear_common_factors(out);
}

inline std::string rat_to_string(const Rat& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

inline std::string poly_to_string(const QPoly& p, const std::string& var) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i <= p.degree(); ++i) {
        Rat c = p.coeff(i);
        if (c == 0) continue;
        if (!first) os << (c > 0 ? " + " : " - ");
        else if (c < 0) os << "-";
        first = false;
        Rat a = c > 0 ? c : -c;
        if (a != 1 || i == 0) os << rat_to_string(a);
        if (i > 0) {
            if (a != 1) os << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

inline std::string to_string(const DifferentialOperator& op) {
    std::string sym = op.form == OpForm::theta ? "theta" : "D";
    std::ostringstream os;
    bool first = true;
    for (int i = 4; i >= 0; --i) {
        if (op.coeffs[i].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << poly_to_string(op.coeffs[i], "z") << ")";
        if (i > 0) os << "*" << sym << (i > 1 ? "^" + std::to_string(i) : "");
    }
    if (first) os << "0";
    return os.str();
}

}  // namespace cymono
