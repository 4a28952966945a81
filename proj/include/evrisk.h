/* evrisk — eviction-risk scoring, outreach routing, and policy comparison.
 *
 * C interface over the core library. Handles are opaque; every function
 * returns a status code, and a failing call leaves a message in
 * evrisk_last_error() (thread-local, valid until the thread's next evrisk
 * call). Strings returned through char** outputs are heap-allocated and must
 * be released with evrisk_string_free().
 */
#ifndef EVRISK_H
#define EVRISK_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evrisk_status {
  EVRISK_OK = 0,
  EVRISK_ERR_VALIDATION = 1, /* bad config, bad arguments, malformed input */
  EVRISK_ERR_RUNTIME = 2     /* missing files, I/O failures, internal errors */
} evrisk_status;

/* Library version, e.g. "1.0.0". Static storage; do not free. */
const char* evrisk_version(void);

/* Message from this thread's most recent failing call; empty string when the
 * last call succeeded. Static storage; do not free. */
const char* evrisk_last_error(void);

/* A fully resolved run configuration. */
typedef struct evrisk_config evrisk_config;

/* Load defaults (json_path NULL) or defaults overlaid with a JSON file.
 * Unknown keys are rejected. On success *out owns the handle. */
evrisk_status evrisk_config_create(const char* json_path, evrisk_config** out);

/* Apply one dotted-path override, e.g. ("synthetic.property_count", "500").
 * The path must exist in the schema; values parse as JSON with a plain-string
 * fallback. */
evrisk_status evrisk_config_set(evrisk_config* cfg, const char* dotted_key, const char* value);

/* Render the fully resolved config as pretty-printed JSON into *json_out. */
evrisk_status evrisk_config_render(const evrisk_config* cfg, char** json_out);

void evrisk_config_free(evrisk_config* cfg);

/* Commands. Each validates the config, writes its artifacts under the
 * configured output directory, and (when summary_out is non-NULL) returns a
 * human-readable summary. Outputs carry no timestamps, so a rerun with the
 * same config and seed reproduces them byte for byte. */
evrisk_status evrisk_cmd_gen(const evrisk_config* cfg, char** summary_out);
evrisk_status evrisk_cmd_train_score(const evrisk_config* cfg, char** summary_out);
evrisk_status evrisk_cmd_compare(const evrisk_config* cfg, char** summary_out);
evrisk_status evrisk_cmd_risk_histogram(const evrisk_config* cfg, char** summary_out);
evrisk_status evrisk_cmd_metrics(const evrisk_config* cfg, char** summary_out);

/* Release a string returned through a char** output. NULL is a no-op. */
void evrisk_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* EVRISK_H */
