#include "toricheights/c_api.h"

#include <new>
#include <string>

#include "commands.hpp"
#include "toricheights/numeric.hpp"

struct th_context {
  std::string result;
  std::string csv;
  std::string error;
};

namespace {

int status_of(th::ErrorKind k) {
  switch (k) {
    case th::ErrorKind::validation:
      return TH_ERR_VALIDATION;
    case th::ErrorKind::numeric:
      return TH_ERR_NUMERIC;
    default:
      return TH_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

th_context* th_context_new(void) { return new (std::nothrow) th_context(); }

void th_context_free(th_context* ctx) { delete ctx; }

int th_set_workers(th_context* ctx, unsigned workers) {
  if (ctx == nullptr) return TH_ERR_VALIDATION;
  th::set_worker_count(workers);
  return TH_OK;
}

int th_run(th_context* ctx, const char* op, const char* request_json) {
  if (ctx == nullptr) return TH_ERR_VALIDATION;
  ctx->result.clear();
  ctx->csv.clear();
  ctx->error.clear();
  if (op == nullptr || request_json == nullptr) {
    ctx->error = "null argument";
    return TH_ERR_VALIDATION;
  }
  try {
    auto req = th::io::json::parse(request_json);
    auto out = th::io::run_command(op, req);
    ctx->result = out.report.dump(2);
    ctx->csv = std::move(out.csv);
    if (!out.target_met) {
      ctx->error = "result does not meet the requested target";
      return TH_ERR_NUMERIC;
    }
    return TH_OK;
  } catch (const th::Error& e) {
    ctx->error = e.what();
    return status_of(e.kind());
  } catch (const th::io::json::exception& e) {
    ctx->error = std::string("bad request: ") + e.what();
    return TH_ERR_VALIDATION;
  } catch (const std::bad_alloc&) {
    ctx->error = "out of memory";
    return TH_ERR_INTERNAL;
  } catch (const std::exception& e) {
    ctx->error = e.what();
    return TH_ERR_INTERNAL;
  }
}

const char* th_result(const th_context* ctx) { return ctx ? ctx->result.c_str() : ""; }
const char* th_result_csv(const th_context* ctx) { return ctx ? ctx->csv.c_str() : ""; }
const char* th_last_error(const th_context* ctx) { return ctx ? ctx->error.c_str() : "null context"; }

const char* th_version(void) { return "0.1.0"; }

}  // extern "C"
