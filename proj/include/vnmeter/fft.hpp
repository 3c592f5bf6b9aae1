#pragma once

// Thin wrapper over FFTW. Plans are built once per shape with FFTW_ESTIMATE
// (deterministic algorithm choice) and shared; executing them is thread-safe.

#include <cstddef>

#include "vnmeter/model.hpp"

namespace vnmeter::fft {

/// `howmany` transforms of length n; element k of line b lives at b * dist + k * stride.
class Batch {
public:
    Batch(std::size_t n, std::size_t howmany, std::size_t stride, std::size_t dist);

    /// In place, sign -1: F(k) = sum_j f(x_j) exp(-i k x_j).
    void forward(Complex* data) const;
    /// In place, sign +1, divided by n.
    void inverse(Complex* data) const;

    std::size_t length() const noexcept { return n_; }

private:
    std::size_t n_;
    std::size_t howmany_;
    std::size_t stride_;
    std::size_t dist_;
    void* forward_plan_;
    void* backward_plan_;
};

void forward(ComplexArray& data);
void inverse(ComplexArray& data);

}  // namespace vnmeter::fft
