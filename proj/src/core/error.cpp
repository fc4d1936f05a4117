#include "core/error.hpp"

namespace hesslab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::argument: return "argument";
  case ErrorKind::precondition: return "precondition";
  case ErrorKind::degenerate_gap: return "degenerate_gap";
  case ErrorKind::branch: return "branch";
  case ErrorKind::numerical: return "numerical";
  case ErrorKind::config: return "config";
  case ErrorKind::discretization: return "discretization";
  case ErrorKind::data: return "data";
  case ErrorKind::io: return "io";
  case ErrorKind::sampler: return "sampler";
  case ErrorKind::fit: return "fit";
  }
  return "unknown";
}

} // namespace hesslab
