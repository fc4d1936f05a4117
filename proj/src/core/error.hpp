#pragma once

#include <stdexcept>
#include <string>

namespace hesslab {

enum class ErrorKind {
  argument,       // malformed input: bad k, index out of range, non-finite entry
  precondition,   // well-formed input outside the operation's domain (e.g. not in the cone)
  degenerate_gap, // lambda_1 coincides with lambda_{m+1}
  branch,         // wrong proof branch for the requested certificate
  numerical,      // iteration cap reached
  config,
  discretization,
  data,
  io,
  sampler,
  fit,            // rank-deficient least-squares system
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const char* what) {
  if (!cond) fail(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

} // namespace hesslab
