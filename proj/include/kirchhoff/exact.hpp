#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

namespace kirchhoff {

using Rat = mpq_class;

inline Rat rat(long p, long q = 1) {
    Rat r(p, q);
    r.canonicalize();
    return r;
}

// Gaussian rational re + i*im.
struct QC {
    Rat re{0};
    Rat im{0};

    QC() = default;
    QC(Rat r, Rat i = Rat(0)) : re(std::move(r)), im(std::move(i)) {}

    static QC imag(Rat i) { return QC(Rat(0), std::move(i)); }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }
    bool is_imag() const { return sgn(re) == 0; }

    QC conj() const { return QC(re, -im); }
    QC times_i() const { return QC(-im, re); }

    QC& operator+=(const QC& o) { re += o.re; im += o.im; return *this; }
    QC& operator-=(const QC& o) { re -= o.re; im -= o.im; return *this; }
    QC& operator*=(const Rat& r) { re *= r; im *= r; return *this; }
    QC& operator/=(const Rat& r) { re /= r; im /= r; return *this; }

    friend QC operator+(QC a, const QC& b) { return a += b; }
    friend QC operator-(QC a, const QC& b) { return a -= b; }
    friend QC operator-(const QC& a) { return QC(-a.re, -a.im); }
    friend QC operator*(const QC& a, const QC& b) {
        return QC(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend QC operator*(QC a, const Rat& r) { return a *= r; }
    friend QC operator*(const Rat& r, QC a) { return a *= r; }
    friend QC operator/(QC a, const Rat& r) { return a /= r; }
    friend bool operator==(const QC& a, const QC& b) { return a.re == b.re && a.im == b.im; }

    // |z|^2 exactly; the modulus itself is only needed in floating point
    Rat norm2() const { return re * re + im * im; }
    double abs() const { return std::sqrt(norm2().get_d()); }
    std::complex<double> to_cd() const { return {re.get_d(), im.get_d()}; }

    std::string str() const {
        if (sgn(im) == 0) return re.get_str();
        if (sgn(re) == 0) return im.get_str() + "i";
        return re.get_str() + (sgn(im) > 0 ? "+" : "") + im.get_str() + "i";
    }
};

}  // namespace kirchhoff
