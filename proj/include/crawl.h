#ifndef CRAWL_H
#define CRAWL_H

/*
 * C interface to the crawl planner/simulator library.
 *
 * Conventions:
 *   - Every fallible call returns a crawl_status and reports details through
 *     the caller-supplied error buffer (always NUL-terminated, possibly
 *     truncated; pass NULL/0 to discard the message).
 *   - Objects returned through out-parameters are owned by the caller and
 *     released with the matching *_free function. Strings returned as char*
 *     are heap copies released with crawl_string_free.
 *   - The library is stateless between calls; handles are independent and
 *     may be used from different threads as long as each handle is confined
 *     to one thread at a time.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum crawl_status {
  CRAWL_OK = 0,
  CRAWL_ERR_ARGUMENT = 1, /* bad parameter or precondition violation */
  CRAWL_ERR_CONFIG = 2,   /* scenario text failed parsing/validation */
  CRAWL_ERR_IO = 3,       /* file could not be read or written */
  CRAWL_ERR_RUNTIME = 4   /* unexpected internal failure */
} crawl_status;

/* Scenario configuration (opaque). */
typedef struct crawl_config crawl_config;
/* Completed run log: per-tick records, events and summary (opaque). */
typedef struct crawl_log crawl_log;

/* Aggregate results of a run, mirroring the JSON summary. */
typedef struct crawl_run_stats {
  uint64_t ticks;
  double duration;     /* simulated seconds actually executed */
  double distance_xy;  /* horizontal CoM travel, metres */
  double min_margin;   /* worst in-plane stability margin during swing/search */
  uint64_t margin_violations;
  uint64_t touchdowns;
  uint64_t touchdowns_search; /* subset declared during searching motion */
  uint64_t step_reflexes;
  uint64_t missed_reflexes;
  uint64_t height_reflexes;
  uint64_t stumbles;
  uint64_t kinematic_errors;
  uint64_t resequences;
  int divergence;       /* observer divergence latched (0/1) */
  int halted;           /* run stopped before the configured duration (0/1) */
  char halt_reason[64]; /* empty string when not halted */
  double final_com[3];
  double grf_error_rms;
} crawl_run_stats;

/* Human-readable name for a status code ("ok", "argument error", ...). */
const char* crawl_status_name(crawl_status status);

/* ---- configuration ------------------------------------------------- */

/* Fresh configuration with documented defaults (NULL only on allocation
 * failure). */
crawl_config* crawl_config_default(void);

/* Parse scenario text. On failure the buffer holds the line-numbered or
 * field-named diagnostic. */
crawl_status crawl_config_parse(const char* text, crawl_config** out,
                                char* errbuf, size_t errlen);

/* Read and parse a scenario file. Unreadable file -> CRAWL_ERR_IO. */
crawl_status crawl_config_load(const char* path, crawl_config** out,
                               char* errbuf, size_t errlen);

/* Override a single value by dotted path, e.g. ("sim.seed", "42"). */
crawl_status crawl_config_set(crawl_config* config, const char* path,
                              const char* value, char* errbuf, size_t errlen);

/* Canonical text form; parsing it back reproduces the configuration. */
crawl_status crawl_config_serialize(const crawl_config* config, char** out,
                                    char* errbuf, size_t errlen);

void crawl_config_free(crawl_config* config);

/* ---- simulation ---------------------------------------------------- */

/* Run the scenario to completion (or halt event). The run itself halting is
 * not an error: the call returns CRAWL_OK and the log records the reason. */
crawl_status crawl_run(const crawl_config* config, crawl_log** out,
                       char* errbuf, size_t errlen);

void crawl_log_free(crawl_log* log);

/* Full CSV log ("# crawl-log v1" schema line, header row, one row per tick). */
crawl_status crawl_log_csv(const crawl_log* log, char** out, char* errbuf,
                           size_t errlen);

/* Run summary as JSON ("crawl-summary v1", stable key order). */
crawl_status crawl_log_summary_json(const crawl_log* log, char** out,
                                    char* errbuf, size_t errlen);

/* Numeric summary without JSON parsing. */
crawl_status crawl_log_stats(const crawl_log* log, crawl_run_stats* out);

/* ---- post-processing ------------------------------------------------ */

/* Extract named channels from CSV log text as aligned numeric columns.
 * Unknown or textual channels -> CRAWL_ERR_ARGUMENT with the available
 * channel names in the error buffer. */
crawl_status crawl_plot_channels(const char* csv_text,
                                 const char* const* channels,
                                 size_t n_channels, char** out, char* errbuf,
                                 size_t errlen);

/* Release a string returned by this library. NULL is ignored. */
void crawl_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CRAWL_H */
