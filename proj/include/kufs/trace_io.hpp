#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "kufs/admm.hpp"

namespace kufs {

inline constexpr const char* kTraceHeader =
    "iteration,objective,v_norm,residual_u,residual_w,mu,selection_changed";

namespace detail {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

template <typename Scalar>
void write_trace_csv(const ConvergenceTrace<Scalar>& trace, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << detail::format_real(static_cast<double>(r.objective)) << ','
        << detail::format_real(static_cast<double>(r.v_norm)) << ','
        << detail::format_real(static_cast<double>(r.residual_u)) << ','
        << detail::format_real(static_cast<double>(r.residual_w)) << ','
        << detail::format_real(static_cast<double>(r.mu)) << ','
        << (r.selection_changed ? 1 : 0) << '\n';
  }
}

template <typename Scalar>
void write_trace_csv(const ConvergenceTrace<Scalar>& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open trace output file: " + path);
  write_trace_csv(trace, out);
}

}  // namespace kufs
