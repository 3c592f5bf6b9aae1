#include "vnmeter/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace vnmeter::fft {

namespace {

using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, int>;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan cached_plan(std::size_t n, std::size_t howmany, std::size_t stride, std::size_t dist,
                      int sign) {
    static std::map<Key, fftw_plan> cache;
    std::lock_guard lock(planner_mutex());
    const Key key{n, howmany, stride, dist, sign};
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    const std::size_t extent = (howmany - 1) * dist + (n - 1) * stride + 1;
    auto* scratch = fftw_alloc_complex(extent);
    int dims[1] = {static_cast<int>(n)};
    fftw_plan plan = fftw_plan_many_dft(1, dims, static_cast<int>(howmany), scratch, nullptr,
                                        static_cast<int>(stride), static_cast<int>(dist), scratch,
                                        nullptr, static_cast<int>(stride), static_cast<int>(dist),
                                        sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) fail(ErrorKind::InvalidArgument, "FFTW could not build a plan");
    cache.emplace(key, plan);
    return plan;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Batch::Batch(std::size_t n, std::size_t howmany, std::size_t stride, std::size_t dist)
    : n_(n),
      howmany_(howmany),
      stride_(stride),
      dist_(dist),
      forward_plan_(cached_plan(n, howmany, stride, dist, FFTW_FORWARD)),
      backward_plan_(cached_plan(n, howmany, stride, dist, FFTW_BACKWARD)) {}

void Batch::forward(Complex* data) const {
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data), as_fftw(data));
}

void Batch::inverse(Complex* data) const {
    fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data), as_fftw(data));
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t b = 0; b < howmany_; ++b) {
        Complex* line = data + b * dist_;
        for (std::size_t k = 0; k < n_; ++k) line[k * stride_] *= scale;
    }
}

void forward(ComplexArray& data) { Batch(data.size(), 1, 1, data.size()).forward(data.data()); }

void inverse(ComplexArray& data) {
    Batch(data.size(), 1, 1, data.size()).inverse(data.data());
}

}  // namespace vnmeter::fft
