#include "hyperlip/rational.hpp"

namespace hyperlip {

Rational parse_rational(const std::string& text) {
    std::string s = text;
    // trim
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    require(!s.empty(), "InvalidRational", "empty rational literal");

    auto slash = s.find('/');
    auto check_int = [&](const std::string& part) {
        require(!part.empty(), "InvalidRational", "missing integer in '" + text + "'");
        std::size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
        require(i < part.size(), "InvalidRational", "bare sign in '" + text + "'");
        for (; i < part.size(); ++i)
            require(part[i] >= '0' && part[i] <= '9', "InvalidRational",
                    "non-integer character in '" + text + "'");
    };
    if (slash == std::string::npos) {
        check_int(s);
        return Rational(BigInt(s));
    }
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    check_int(num);
    check_int(den);
    BigInt d(den);
    require(d != 0, "InvalidRational", "zero denominator in '" + text + "'");
    return Rational(BigInt(num), d);
}

std::string rat_to_string(const Rational& r) {
    BigInt n = rat_num(r), d = rat_den(r);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

Rational rat_pow(const Rational& base, int exp) {
    if (exp == 0) return Rational(1);
    bool inv = exp < 0;
    int e = inv ? -exp : exp;
    Rational acc(1);
    Rational b = base;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    if (inv) {
        require(acc != 0, "InvalidArgument", "zero base with negative exponent");
        return Rational(1) / acc;
    }
    return acc;
}

RatMat mat_identity_q(int d) {
    RatMat m(d, RatVec(d, Rational(0)));
    for (int i = 0; i < d; ++i) m[i][i] = 1;
    return m;
}

RatMat mat_transpose_q(const RatMat& m) {
    int r = (int)m.size(), c = (int)m[0].size();
    RatMat t(c, RatVec(r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) t[j][i] = m[i][j];
    return t;
}

RatMat mat_mul_q(const RatMat& a, const RatMat& b) {
    int n = (int)a.size(), k = (int)b.size(), m = (int)b[0].size();
    RatMat out(n, RatVec(m, Rational(0)));
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < k; ++t) {
            if (a[i][t] == 0) continue;
            for (int j = 0; j < m; ++j) out[i][j] += a[i][t] * b[t][j];
        }
    return out;
}

RatVec mat_apply_q(const RatMat& m, const RatVec& v) {
    int r = (int)m.size(), c = (int)m[0].size();
    RatVec out(r, Rational(0));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            if (m[i][j] != 0) out[i] += m[i][j] * v[j];
    return out;
}

bool mat_is_orthogonal_q(const RatMat& m) {
    int d = (int)m.size();
    for (const auto& row : m)
        if ((int)row.size() != d) return false;
    RatMat p = mat_mul_q(mat_transpose_q(m), m);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (p[i][j] != Rational(i == j ? 1 : 0)) return false;
    return true;
}

} // namespace hyperlip
