#include "sigest/spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "sigest/common.hpp"

namespace sigest {

namespace {

// FFTW's planner is not thread-safe; plans themselves may be executed
// concurrently through the new-array interface as long as the buffers share
// the plan-time alignment, which fftw_malloc guarantees.
std::mutex planner_mutex;

fftw_plan backward_plan(int rows, int cols) {
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(planner_mutex);
    auto it = cache.find({rows, cols});
    if (it != cache.end())
        return it->second;
    fftw_complex* scratch = fftw_alloc_complex(static_cast<std::size_t>(rows) * cols);
    fftw_plan plan = fftw_plan_dft_2d(rows, cols, scratch, scratch, FFTW_BACKWARD,
                                      FFTW_ESTIMATE);
    fftw_free(scratch);
    cache.emplace(std::pair<int, int>{rows, cols}, plan);
    return plan;
}

struct FftwArray {
    fftw_complex* ptr;
    explicit FftwArray(std::size_t n) : ptr(fftw_alloc_complex(n)) {}
    ~FftwArray() { fftw_free(ptr); }
    FftwArray(const FftwArray&) = delete;
    FftwArray& operator=(const FftwArray&) = delete;
};

} // namespace

AngleDelayMap angle_delay_map(const SpaceFrequencyResponse& H) {
    H.validate();
    const int M = H.config.num_antennas;
    const int N = H.config.num_subcarriers;
    const std::size_t count = static_cast<std::size_t>(M) * N;

    fftw_plan plan = backward_plan(M, N);
    FftwArray in(count), out(count);
    for (std::size_t i = 0; i < count; ++i) {
        in.ptr[i][0] = H.data[i].real();
        in.ptr[i][1] = H.data[i].imag();
    }
    fftw_execute_dft(plan, in.ptr, out.ptr);

    AngleDelayMap G(H.config);
    const double scale = 1.0 / std::sqrt(static_cast<double>(count));
    for (std::size_t i = 0; i < count; ++i)
        G.data[i] = cplx{out.ptr[i][0], out.ptr[i][1]} * scale;
    return G;
}

cplx project_bin(const SpaceFrequencyResponse& H, double angle_cycles,
                 double delay_cycles) {
    const int M = H.config.num_antennas;
    const int N = H.config.num_subcarriers;

    std::vector<cplx> col_phase(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n)
        col_phase[n] = cis_cycles(n * delay_cycles);

    cplx acc{0.0, 0.0};
    for (int m = 0; m < M; ++m) {
        cplx row{0.0, 0.0};
        const cplx* h = &H.data[static_cast<std::size_t>(m) * N];
        for (int n = 0; n < N; ++n)
            row += h[n] * col_phase[n];
        acc += row * cis_cycles(m * angle_cycles);
    }
    return acc / std::sqrt(static_cast<double>(M) * N);
}

cplx dirichlet(int length, double x) {
    if (length < 1)
        throw ConfigError("dirichlet length must be >= 1");
    const double xr = wrap_half(x); // the kernel is 1-periodic
    const double denom = std::sin(std::numbers::pi * xr);
    if (std::abs(denom) < 1e-12)
        return {static_cast<double>(length), 0.0}; // removable singularity
    const double ratio = std::sin(length * std::numbers::pi * xr) / denom;
    return std::polar(ratio, -std::numbers::pi * xr * (length - 1));
}

cplx predict_leakage_narrowband(const RadioScene& scene, const SystemConfig& config,
                                int k, int l) {
    config.validate();
    scene.validate();
    if (config.alpha != 0.0)
        throw ConfigError("the closed-form leakage holds only for alpha = 0");

    const int M = config.num_antennas;
    const int N = config.num_subcarriers;
    cplx acc{0.0, 0.0};
    for (const auto& p : scene.paths)
        acc += p.gain * dirichlet(M, p.norm_angle - static_cast<double>(k) / M) *
               dirichlet(N, p.norm_delay - static_cast<double>(l) / N);
    return acc / std::sqrt(static_cast<double>(M) * N);
}

int predicted_spread_bins(double norm_angle, const SystemConfig& config) {
    config.validate();
    if (!(norm_angle >= 0.0 && norm_angle < 1.0))
        throw ConfigError("normalized angle must lie in [0, 1)");
    return round_half_up(config.alpha * config.num_antennas * norm_angle);
}

SpaceFrequencyResponse rotate_response(const SpaceFrequencyResponse& H,
                                       const RotationOffset& offset) {
    H.validate();
    const int M = H.config.num_antennas;
    const int N = H.config.num_subcarriers;

    std::vector<cplx> row_phase(static_cast<std::size_t>(M));
    std::vector<cplx> col_phase(static_cast<std::size_t>(N));
    for (int m = 0; m < M; ++m)
        row_phase[m] = cis_cycles(m * offset.d_angle);
    for (int n = 0; n < N; ++n)
        col_phase[n] = cis_cycles(n * offset.d_delay);

    SpaceFrequencyResponse out(H.config);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n)
            out.at(m, n) = row_phase[m] * H.at(m, n) * col_phase[n];
    return out;
}

} // namespace sigest
