#pragma once

#include <cstddef>
#include <span>

// Data-parallel arithmetic primitives used by the model-fitting inner loops.
// A scalar reference implementation always exists; on x86-64 an AVX2+FMA
// variant (and on aarch64 a NEON variant) is selected at runtime when the
// CPU supports it. The environment variable CAUSAL_DR_KERNELS=scalar|avx2|
// neon|auto overrides the automatic choice.
//
// Reductions (dot, sum, sumsq, sq_dist) may differ from the scalar backend
// in the last few ulps because the vector variants reorder additions;
// elementwise ops (axpy, scale, clamp) are exact matches.
namespace causaldr::kernels {

enum class Backend { Scalar, Avx2, Neon };

Backend active_backend();
bool available(Backend b);
const char* name(Backend b);

// Throws ParameterError if the backend is not available on this machine.
// Intended for tests and benchmarking; normal code never calls this.
void set_backend(Backend b);

double dot(std::span<const double> x, std::span<const double> y);
double sum(std::span<const double> x);
double sumsq(std::span<const double> x);

// Squared Euclidean distance between x and y.
double sq_dist(std::span<const double> x, std::span<const double> y);

// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

// x *= a
void scale(std::span<double> x, double a);

// Elementwise clamp of x into [lo, hi].
void clamp(std::span<double> x, double lo, double hi);

// Rank-1 symmetric update of the upper triangle of a row-major q-by-q
// matrix: g += w * f * f^T (entries below the diagonal untouched).
void sym_rank1_update(double* g, std::size_t q, double w, const double* f);

}  // namespace causaldr::kernels
