# Centralized command-line texts

# --- Errors ---
CONFIG_REQUIRED = "❌ The '{command}' command needs --config <path>"
WINDOW_REQUIRED = "❌ No search window: pass --window START END or add a [peaks] section to the config"
STAGE_FAILED = "❌ {error}"
UNEXPECTED_ERROR = "💥 Unexpected failure, see the log for the traceback"
NOTHING_TO_SYNTHESIZE = "❌ Config has neither [[chromatograms]] nor [dataset.synthetic]; nothing to generate"

# --- synth ---
CHROMATOGRAM_WRITTEN = "🧪 Chromatogram {id} ({samples} samples) -> {path}"
DATASET_WRITTEN = "📄 Synthetic dataset {name}: {rows} records in {tiers} tiers -> {path}"

# --- peaks ---
PEAK_MEASURED = "📈 {id}: tR {retention_time:.4f} min, SNR {snr}, skewness {skewness:.4f}, area {area:.6g}"
PEAKS_WRITTEN = "✅ {count} peak measurement(s) -> {path}"

# --- build-table ---
TABLE_WRITTEN = "✅ Quality table {name}: {rows} records ({incomplete} with nulls) -> {path}"

# --- cluster ---
CLUSTERED = (
    "🔎 k={k} (elbow {elbow_k}{low}), silhouette {silhouette}; "
    "train/test {n_train}/{n_test}"
)
LOW_CURVATURE = ", low curvature"
CLUSTER_SIZE = "   cluster {cluster}: {train} train / {test} test"

# --- evaluate / run ---
CLUSTER_RESULT = "   cluster {cluster}: {status}{details}"
MODEL_DETAILS = " {family}, RMSE test {rmse}, R2 test {r2}"
RANKING = "🏁 Quality ranking: {ranking}"
FILES_WRITTEN = "✅ {count} file(s) written to {path}"

# --- report ---
REPORT_RENDERED = "✅ Report for {dataset} re-rendered: {count} file(s) in {path}"
