#ifndef TORICHEIGHTS_C_API_H
#define TORICHEIGHTS_C_API_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define TH_API __attribute__((visibility("default")))
#else
#define TH_API
#endif

/* Status codes returned by th_run. */
#define TH_OK 0
#define TH_ERR_VALIDATION 2
#define TH_ERR_NUMERIC 3
#define TH_ERR_INTERNAL 4

typedef struct th_context th_context;

TH_API th_context* th_context_new(void);
TH_API void th_context_free(th_context* ctx);

/* Worker threads for this process; 0 restores the default. */
TH_API int th_set_workers(th_context* ctx, unsigned workers);

/*
 * Runs one command, e.g. op = "toric.gualdi", with a JSON request object.
 * On TH_OK (and on TH_ERR_NUMERIC when a report was still produced) the JSON
 * report is available from th_result and the tabular form, if any, from
 * th_result_csv. Returned strings are owned by the context and stay valid
 * until the next th_run on it.
 */
TH_API int th_run(th_context* ctx, const char* op, const char* request_json);
TH_API const char* th_result(const th_context* ctx);
TH_API const char* th_result_csv(const th_context* ctx);
TH_API const char* th_last_error(const th_context* ctx);

TH_API const char* th_version(void);

#ifdef __cplusplus
}
#endif

#endif
