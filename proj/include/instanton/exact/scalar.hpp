#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "instanton/error.hpp"

namespace instanton {

// Expression templates off: `auto` never captures a temporary.
using Int = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
using Rat = boost::multiprecision::number<boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
                                          boost::multiprecision::et_off>;

inline Rat make_rat(const Int& n, const Int& d) { return Rat(n, d); }

inline std::string to_string(const Int& x) { return x.str(); }

inline std::string to_string(const Rat& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

// Accepts "a", "-a", "a/b"; whitespace is not allowed.
inline Rat parse_rat(const std::string& s) {
    auto bad = [&] { return Error("io.bad-number", "malformed exact number '" + s + "'"); };
    if (s.empty()) throw bad();
    auto slash = s.find('/');
    auto parse_int = [&](const std::string& t) {
        if (t.empty()) throw bad();
        size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) throw bad();
        for (size_t j = i; j < t.size(); ++j)
            if (t[j] < '0' || t[j] > '9') throw bad();
        return Int(t.substr(t[0] == '+' ? 1 : 0));
    };
    if (slash == std::string::npos) return Rat(parse_int(s));
    Int n = parse_int(s.substr(0, slash));
    Int d = parse_int(s.substr(slash + 1));
    if (d == 0) throw bad();
    return Rat(n, d);
}

inline int64_t mod_floor(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

inline bool is_odd_prime(int64_t p) {
    if (p < 3 || p % 2 == 0) return false;
    for (int64_t d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

// Element of F_p.  A zero-initialised value has modulus 0 and adopts the
// modulus of whatever it meets, so containers can be default filled.
class Fp {
public:
    Fp() = default;
    explicit Fp(int64_t v) : v_(v) {}
    Fp(int64_t v, int64_t p) : v_(p ? mod_floor(v, p) : v), p_(p) {}

    int64_t value() const { return v_; }
    int64_t modulus() const { return p_; }
    bool is_zero() const { return v_ == 0; }

    Fp operator+(const Fp& o) const { auto p = join(o); return Fp(p ? (v_ + o.v_) % p : v_ + o.v_, p); }
    Fp operator-(const Fp& o) const { return Fp(v_ - o.v_, join(o)); }
    Fp operator-() const { return Fp(-v_, p_); }
    Fp operator*(const Fp& o) const {
        auto p = join(o);
        __int128 m = static_cast<__int128>(v_) * o.v_;
        return Fp(static_cast<int64_t>(p ? m % p : m), p);
    }
    Fp inverse() const {
        if (p_ == 0 && (v_ == 1 || v_ == -1)) return *this;
        if (v_ == 0) throw Error("exact.division-by-zero", "inverse of zero in F_p");
        int64_t a = v_, m = p_, x0 = 1, x1 = 0;
        while (m) {
            int64_t q = a / m;
            std::tie(a, m) = std::make_pair(m, a - q * m);
            std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
        }
        return Fp(x0, p_);
    }
    Fp operator/(const Fp& o) const { return *this * o.inverse(); }
    Fp& operator+=(const Fp& o) { return *this = *this + o; }
    Fp& operator-=(const Fp& o) { return *this = *this - o; }
    Fp& operator*=(const Fp& o) { return *this = *this * o; }
    bool operator==(const Fp& o) const { return v_ == o.v_; }
    bool operator!=(const Fp& o) const { return v_ != o.v_; }

private:
    int64_t join(const Fp& o) const { return p_ ? p_ : o.p_; }
    int64_t v_ = 0;
    int64_t p_ = 0;
};

// Univariate polynomial over a field K, low degree first, no trailing zeros.
template <class K>
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<K> c) : c_(std::move(c)) { trim(); }
    static Poly constant(const K& k) { return Poly(std::vector<K>{k}); }
    static Poly monomial(const K& k, size_t e) {
        std::vector<K> c(e + 1, k - k);
        c[e] = k;
        return Poly(std::move(c));
    }

    const std::vector<K>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    long degree() const { return static_cast<long>(c_.size()) - 1; }
    const K& lead() const { return c_.back(); }
    K coeff(size_t i) const { return i < c_.size() ? c_[i] : K(); }

    Poly operator+(const Poly& o) const {
        std::vector<K> r(std::max(c_.size(), o.c_.size()));
        for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) + o.coeff(i);
        return Poly(std::move(r));
    }
    Poly operator-() const {
        std::vector<K> r(c_.size());
        for (size_t i = 0; i < r.size(); ++i) r[i] = -c_[i];
        return Poly(std::move(r));
    }
    Poly operator-(const Poly& o) const { return *this + (-o); }
    Poly operator*(const Poly& o) const {
        if (is_zero() || o.is_zero()) return Poly();
        std::vector<K> r(c_.size() + o.c_.size() - 1);
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] = r[i + j] + c_[i] * o.c_[j];
        return Poly(std::move(r));
    }
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    bool operator==(const Poly& o) const { return c_ == o.c_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    static void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
        if (b.is_zero()) throw Error("exact.division-by-zero", "polynomial division by zero");
        r = a;
        std::vector<K> qc(a.c_.size() >= b.c_.size() ? a.c_.size() - b.c_.size() + 1 : 0);
        K inv = K(1) / b.lead();
        while (!r.is_zero() && r.degree() >= b.degree()) {
            size_t shift = static_cast<size_t>(r.degree() - b.degree());
            K f = r.lead() * inv;
            qc[shift] = f;
            r = r - monomial(f, shift) * b;
        }
        q = Poly(std::move(qc));
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == (c_.back() - c_.back())) c_.pop_back();
    }
    std::vector<K> c_;
};

template <>
inline void Poly<Fp>::divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
    if (b.is_zero()) throw Error("exact.division-by-zero", "polynomial division by zero");
    r = a;
    std::vector<Fp> qc(a.c_.size() >= b.c_.size() ? a.c_.size() - b.c_.size() + 1 : 0);
    Fp inv = b.lead().inverse();
    while (!r.is_zero() && r.degree() >= b.degree()) {
        size_t shift = static_cast<size_t>(r.degree() - b.degree());
        Fp f = r.lead() * inv;
        qc[shift] = f;
        r = r - monomial(f, shift) * b;
    }
    q = Poly(std::move(qc));
}

// Uniform interface used by the generic linear algebra.
template <class T>
struct Alg;

template <>
struct Alg<Int> {
    static constexpr bool is_field = false;
    static Int zero(const Int&) { return 0; }
    static Int one(const Int&) { return 1; }
    static bool is_zero(const Int& a) { return a == 0; }
    static bool is_unit(const Int& a) { return a == 1 || a == -1; }
    static Int norm(const Int& a) { return abs(a); }
    static void divmod(const Int& a, const Int& b, Int& q, Int& r) {
        q = a / b;
        r = a - q * b;
    }
    static Int canonical_unit(const Int& a) { return a < 0 ? Int(-1) : Int(1); }
    static Int unit_inverse(const Int& u) { return u; }
    static std::string str(const Int& a) { return to_string(a); }
};

template <>
struct Alg<Rat> {
    static constexpr bool is_field = true;
    static Rat zero(const Rat&) { return 0; }
    static Rat one(const Rat&) { return 1; }
    static bool is_zero(const Rat& a) { return a == 0; }
    static bool is_unit(const Rat& a) { return a != 0; }
    static Int norm(const Rat& a) { return a == 0 ? 0 : 1; }
    static void divmod(const Rat& a, const Rat& b, Rat& q, Rat& r) {
        q = a / b;
        r = 0;
    }
    static Rat inv(const Rat& a) { return 1 / a; }
    static Rat canonical_unit(const Rat& a) { return a == 0 ? Rat(1) : 1 / a; }
    static Rat unit_inverse(const Rat& u) { return 1 / u; }
    static std::string str(const Rat& a) { return to_string(a); }
};

template <>
struct Alg<Fp> {
    static constexpr bool is_field = true;
    static Fp zero(const Fp& p) { return Fp(0, p.modulus()); }
    static Fp one(const Fp& p) { return Fp(1, p.modulus()); }
    static bool is_zero(const Fp& a) { return a.is_zero(); }
    static bool is_unit(const Fp& a) { return !a.is_zero(); }
    static Int norm(const Fp& a) { return a.is_zero() ? 0 : 1; }
    static void divmod(const Fp& a, const Fp& b, Fp& q, Fp& r) {
        q = a / b;
        r = zero(a);
    }
    static Fp inv(const Fp& a) { return a.inverse(); }
    static Fp canonical_unit(const Fp& a) { return a.is_zero() ? Fp(1, a.modulus()) : a.inverse(); }
    static Fp unit_inverse(const Fp& u) { return u.inverse(); }
    static std::string str(const Fp& a) { return std::to_string(a.value()); }
};

template <class K>
struct Alg<Poly<K>> {
    using P = Poly<K>;
    static constexpr bool is_field = false;
    static P zero(const P&) { return P(); }
    static P one(const P& p) {
        K one_k = p.is_zero() ? K(1) : Alg<K>::one(p.lead());
        return P::constant(one_k);
    }
    static bool is_zero(const P& a) { return a.is_zero(); }
    static bool is_unit(const P& a) { return a.degree() == 0; }
    static Int norm(const P& a) { return a.is_zero() ? 0 : Int(a.degree() + 1); }
    static void divmod(const P& a, const P& b, P& q, P& r) { P::divmod(a, b, q, r); }
    static P canonical_unit(const P& a) {
        if (a.is_zero()) return one(a);
        return P::constant(Alg<K>::inv(a.lead()));
    }
    static P unit_inverse(const P& u) { return P::constant(Alg<K>::inv(u.lead())); }
    static std::string str(const P& a) {
        if (a.is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (long i = a.degree(); i >= 0; --i) {
            const K& c = a.coeffs()[static_cast<size_t>(i)];
            if (Alg<K>::is_zero(c)) continue;
            if (!first) os << " + ";
            first = false;
            std::string cs = Alg<K>::str(c);
            if (i == 0) os << cs;
            else {
                if (cs != "1") os << cs << "*";
                os << "U";
                if (i > 1) os << "^" << i;
            }
        }
        return os.str();
    }
};

// Rationals from documents are pushed into the working ring here.
template <class T>
T from_rat(const Rat& x, const T& proto);

template <>
inline Int from_rat<Int>(const Rat& x, const Int&) {
    if (denominator(x) != 1)
        throw Error("ring.non-integral", "coefficient " + to_string(x) + " is not an integer");
    return numerator(x);
}

template <>
inline Rat from_rat<Rat>(const Rat& x, const Rat&) { return x; }

template <>
inline Fp from_rat<Fp>(const Rat& x, const Fp& proto) {
    int64_t p = proto.modulus();
    Int pn = p;
    Int n = numerator(x) % pn, d = denominator(x) % pn;
    if (d == 0)
        throw Error("ring.non-integral", "denominator of " + to_string(x) + " vanishes mod " + std::to_string(p));
    return Fp(static_cast<int64_t>(n), p) / Fp(static_cast<int64_t>(d), p);
}

// Runtime description of a coefficient ring.
struct Ring {
    enum class Kind { integers, rationals, prime_field, poly };
    Kind kind = Kind::rationals;
    int64_t p = 0;
    Kind base = Kind::rationals;  // for poly
    int var_degree = -4;          // for poly

    static Ring Z() { return {Kind::integers, 0, Kind::rationals, 0}; }
    static Ring Q() { return {Kind::rationals, 0, Kind::rationals, 0}; }
    static Ring F(int64_t p) {
        if (!is_odd_prime(p))
            throw Error("ring.bad-characteristic", "prime field needs an odd prime, got " + std::to_string(p));
        return {Kind::prime_field, p, Kind::rationals, 0};
    }
    static Ring poly_over(const Ring& field, int var_degree) {
        if (!field.is_field()) throw Error("ring.not-field", "polynomial rings are formed over fields only");
        if (var_degree % 2 != 0) throw Error("ring.bad-degree", "polynomial variable degree must be even");
        return {Kind::poly, field.p, field.kind, var_degree};
    }
    bool is_field() const { return kind == Kind::rationals || kind == Kind::prime_field; }
    bool is_pid() const { return kind == Kind::integers || kind == Kind::poly || is_field(); }
    bool char_two_free() const { return is_field(); }

    std::string name() const {
        switch (kind) {
            case Kind::integers: return "Z";
            case Kind::rationals: return "Q";
            case Kind::prime_field: return "F" + std::to_string(p);
            case Kind::poly: return (base == Kind::rationals ? std::string("Q") : "F" + std::to_string(p)) + "[U]";
        }
        return "?";
    }
};

// "q", "z", "fp:P"
inline Ring parse_ring(const std::string& s) {
    if (s == "q" || s == "Q") return Ring::Q();
    if (s == "z" || s == "Z") return Ring::Z();
    if (s.rfind("fp:", 0) == 0) {
        std::string t = s.substr(3);
        if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
            throw Error("usage.bad-coefficients", "bad prime in '" + s + "'");
        return Ring::F(std::stoll(t));
    }
    throw Error("usage.bad-coefficients", "unknown coefficient choice '" + s + "'");
}

}  // namespace instanton
