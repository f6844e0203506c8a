#pragma once

#include <cmath>
#include <complex>

namespace esos {

// Neumaier's variant of Kahan summation, applied to real and imaginary parts separately.
class compensated_sum {
public:
    void add(std::complex<real> x)
    {
        add_part(re_, cre_, x.real());
        add_part(im_, cim_, x.imag());
    }

    std::complex<real> value() const { return {re_ + cre_, im_ + cim_}; }

private:
    static void add_part(real &sum, real &comp, real x)
    {
        const real t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }

    real re_ = 0.0L, im_ = 0.0L;
    real cre_ = 0.0L, cim_ = 0.0L;
};

} // namespace esos
