#pragma once

#include <cstring>
#include <new>
#include <string>

#include "core/error.hpp"
#include "core/field.hpp"
#include "core/problem.hpp"
#include "hesslab/hesslab.h"

struct hl_problem {
  hesslab::ProblemSpec spec;
};

struct hl_field {
  hesslab::ScalarField u;
};

namespace hesslab::capi {

void set_error(std::string msg);
void clear_error();
hl_status status_of(ErrorKind kind) noexcept;

template <class F>
hl_status guard(F&& body) noexcept {
  try {
    clear_error();
    body();
    return HL_OK;
  } catch (const Error& e) {
    set_error(e.what());
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return HL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return HL_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown exception");
    return HL_ERR_INTERNAL;
  }
}

inline void need(const void* p, const char* name) {
  if (!p) fail(ErrorKind::argument, std::string(name) + " must not be NULL");
}

} // namespace hesslab::capi
