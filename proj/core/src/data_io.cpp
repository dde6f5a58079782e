#include "ncdd/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "ncdd/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ncdd {

namespace {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view token, const std::string& path, std::size_t line) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end)
    fail(ErrorCode::kParse,
         path + ":" + std::to_string(line) + ": bad number '" + std::string(token) + "'");
  return value;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) fail(ErrorCode::kParse, "cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) fail(ErrorCode::kParse, "cannot open '" + path + "' for reading: missing file?");
  return in;
}

void write_csv_rows(std::ostream& out, const Eigen::MatrixXd& values) {
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      out << format_double(values(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_csv_rows(std::istream& in, const std::string& path, std::size_t first_line,
                              Eigen::Index expect_rows, Eigen::Index expect_cols) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = first_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      row.push_back(parse_double(std::string_view(line).substr(start, comma - start), path, line_no));
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorCode::kParse, path + ":" + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::kParse, path + ": no data rows");
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < values.rows(); ++r)
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      values(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  if (expect_rows >= 0 && (values.rows() != expect_rows || values.cols() != expect_cols))
    fail(ErrorCode::kParse, path + ": matrix is " + std::to_string(values.rows()) + "x" +
                                std::to_string(values.cols()) + ", header said " +
                                std::to_string(expect_rows) + "x" + std::to_string(expect_cols));
  return values;
}

}  // namespace

std::vector<GraphSignalSample> window_recording(const Eigen::MatrixXd& recording, double window_s,
                                                double overlap_s, double rate_hz) {
  if (rate_hz <= 0.0) fail(ErrorCode::kConfigError, "sampling rate must be positive");
  if (!(window_s > overlap_s) || overlap_s < 0.0)
    fail(ErrorCode::kConfigError, "need window_s > overlap_s >= 0");
  const double t_real = window_s * rate_hz;
  const double stride_real = (window_s - overlap_s) * rate_hz;
  const auto t = static_cast<Eigen::Index>(std::llround(t_real));
  const auto stride = static_cast<Eigen::Index>(std::llround(stride_real));
  if (std::abs(t_real - static_cast<double>(t)) > 1e-6 ||
      std::abs(stride_real - static_cast<double>(stride)) > 1e-6)
    fail(ErrorCode::kConfigError, "window and stride must be integral sample counts");
  if (t < 1 || stride < 1) fail(ErrorCode::kConfigError, "window and stride must be positive");

  std::vector<GraphSignalSample> windows;
  std::int64_t index = 0;
  for (Eigen::Index offset = 0; offset + t <= recording.cols(); offset += stride) {
    GraphSignalSample sample;
    sample.values = recording.middleCols(offset, t);
    sample.sample_index = index++;
    sample.timestamp = static_cast<std::int64_t>(offset);
    windows.push_back(std::move(sample));
  }
  return windows;
}

void write_sample_csv(const std::string& path, const Eigen::MatrixXd& values) {
  auto out = open_out(path);
  write_csv_rows(out, values);
}

Eigen::MatrixXd read_sample_csv(const std::string& path) {
  auto in = open_in(path);
  return read_csv_rows(in, path, 0, -1, -1);
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& values) {
  auto out = open_out(path);
  out << "ncdd-matrix v1 " << values.rows() << ' ' << values.cols() << '\n';
  write_csv_rows(out, values);
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  auto in = open_in(path);
  std::string tag, version;
  Eigen::Index rows = 0, cols = 0;
  std::string header;
  if (!std::getline(in, header)) fail(ErrorCode::kParse, path + ": empty file");
  std::istringstream hs(header);
  if (!(hs >> tag >> version >> rows >> cols) || tag != "ncdd-matrix")
    fail(ErrorCode::kVersionMismatch, path + ": not an ncdd-matrix file");
  if (version != "v1") fail(ErrorCode::kVersionMismatch, path + ": unsupported version " + version);
  return read_csv_rows(in, path, 1, rows, cols);
}

void write_similarity(const std::string& path, const SimilarityMatrix& s) {
  write_matrix(path, s.values);
}

SimilarityMatrix read_similarity(const std::string& path) {
  return SimilarityMatrix{read_matrix(path)};
}

void write_adjacency(const std::string& path, const Topology& topology) {
  write_matrix(path, topology.adjacency().cast<double>());
}

Topology read_adjacency(const std::string& path) {
  const Eigen::MatrixXd values = read_matrix(path);
  Eigen::MatrixXi adj(values.rows(), values.cols());
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (values(r, c) != 0.0 && values(r, c) != 1.0)
        fail(ErrorCode::kParse, path + ": adjacency entries must be 0 or 1");
      adj(r, c) = static_cast<int>(values(r, c));
    }
  }
  return Topology::from_adjacency(adj);
}

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
  json doc;
  doc["format"] = "ncdd-dataset";
  doc["version"] = 1;
  doc["n_nodes"] = manifest.n_nodes;
  doc["t_len"] = manifest.t_len;
  doc["sampling_rate_hz"] = manifest.sampling_rate_hz;
  json entries = json::array();
  for (const DatasetManifest::Entry& entry : manifest.entries) {
    entries.push_back({{"path", entry.path}, {"label", entry.label}, {"timestamp", entry.timestamp}});
  }
  doc["entries"] = std::move(entries);
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

DatasetManifest read_manifest(const std::string& path) {
  auto in = open_in(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, path + ": " + e.what());
  }
  if (!doc.contains("format") || doc["format"] != "ncdd-dataset" || !doc.contains("version"))
    fail(ErrorCode::kVersionMismatch, path + ": not an ncdd-dataset manifest");
  if (doc["version"] != 1)
    fail(ErrorCode::kVersionMismatch, path + ": unsupported manifest version");
  DatasetManifest manifest;
  try {
    manifest.n_nodes = doc.at("n_nodes").get<int>();
    manifest.t_len = doc.at("t_len").get<int>();
    manifest.sampling_rate_hz = doc.at("sampling_rate_hz").get<double>();
    for (const json& entry : doc.at("entries")) {
      DatasetManifest::Entry e;
      e.path = entry.at("path").get<std::string>();
      e.label = entry.at("label").get<int>();
      e.timestamp = entry.at("timestamp").get<std::int64_t>();
      manifest.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, path + ": " + e.what());
  }
  return manifest;
}

std::vector<GraphSignalSample> read_dataset(const std::string& manifest_path,
                                            DatasetManifest* manifest_out) {
  const DatasetManifest manifest = read_manifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<GraphSignalSample> samples;
  samples.reserve(manifest.entries.size());
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const DatasetManifest::Entry& entry = manifest.entries[i];
    const fs::path sample_path = base / entry.path;
    if (!fs::exists(sample_path))
      fail(ErrorCode::kParse, manifest_path + ": referenced sample file '" +
                                  sample_path.string() + "' does not exist");
    GraphSignalSample sample;
    sample.values = read_sample_csv(sample_path.string());
    sample.sample_index = static_cast<std::int64_t>(i);
    sample.timestamp = entry.timestamp;
    sample.label = entry.label;
    validate_sample(sample, manifest.n_nodes, manifest.t_len);
    samples.push_back(std::move(sample));
  }
  if (manifest_out) *manifest_out = manifest;
  return samples;
}

void write_dataset(const std::string& dir, const std::vector<GraphSignalSample>& samples,
                   double sampling_rate_hz) {
  if (samples.empty()) fail(ErrorCode::kPreconditionViolated, "no samples to write");
  fs::create_directories(fs::path(dir) / "samples");
  DatasetManifest manifest;
  manifest.n_nodes = samples[0].n_nodes();
  manifest.t_len = samples[0].t_len();
  manifest.sampling_rate_hz = sampling_rate_hz;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "samples/sample_%06zu.csv", i);
    write_sample_csv((fs::path(dir) / name).string(), samples[i].values);
    DatasetManifest::Entry entry;
    entry.path = name;
    entry.label = samples[i].label.value_or(0);
    entry.timestamp = samples[i].timestamp.value_or(static_cast<std::int64_t>(i));
    manifest.entries.push_back(std::move(entry));
  }
  write_manifest((fs::path(dir) / "manifest.json").string(), manifest);
}

namespace {

constexpr char kParamMagic[8] = {'N', 'C', 'D', 'D', 'P', 'R', 'M', '1'};

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64(buf, bits);
}

class Cursor {
 public:
  Cursor(const std::string& data, const std::string& path) : data_(data), path_(path) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(byte()); }

  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
    return v;
  }

  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  void done() {
    if (pos_ != data_.size()) fail(ErrorCode::kParse, path_ + ": trailing bytes");
  }

 private:
  unsigned char byte() {
    if (pos_ >= data_.size()) fail(ErrorCode::kParse, path_ + ": truncated parameter file");
    return static_cast<unsigned char>(data_[pos_++]);
  }

  const std::string& data_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_parameters(const std::string& path, const TrainableParameters& params,
                      const Topology& topology) {
  const ModelSpec& spec = params.spec();
  std::string buf;
  buf.append(kParamMagic, sizeof(kParamMagic));
  put_u32(buf, 1);  // header version
  put_u32(buf, static_cast<std::uint32_t>(topology.n_nodes()));
  put_u32(buf, static_cast<std::uint32_t>(spec.k_iterations));
  put_u32(buf, static_cast<std::uint32_t>(spec.d0));
  put_u32(buf, static_cast<std::uint32_t>(spec.inner_windows));
  put_u32(buf, static_cast<std::uint32_t>(spec.bins));
  put_u32(buf, static_cast<std::uint32_t>(spec.inner_len));
  buf.push_back(spec.domain == Domain::kTime ? 0 : 1);
  buf.push_back(spec.aggregator == AggregatorKind::kMean ? 0 : 1);
  buf.push_back(spec.activation == Activation::kRelu ? 0 : 1);
  buf.push_back(static_cast<char>(spec.theta_mode));
  buf.push_back(static_cast<char>(spec.psi_mode));
  for (int i = 0; i < 3; ++i) buf.push_back(0);  // pad
  put_f64(buf, spec.cn_epsilon);
  put_u64(buf, params.seed().value);
  for (int size : spec.band_sizes) put_u32(buf, static_cast<std::uint32_t>(size));
  put_u32(buf, static_cast<std::uint32_t>(params.free_variables().size()));
  for (int u = 0; u < topology.n_nodes(); ++u)
    for (int v = 0; v < topology.n_nodes(); ++v)
      buf.push_back(static_cast<char>(topology.adjacency()(u, v)));
  for (Eigen::Index i = 0; i < params.free_variables().size(); ++i)
    put_f64(buf, params.free_variables()(i));

  auto out = open_out(path, std::ios::out | std::ios::binary);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::pair<TrainableParameters, Topology> read_parameters(const std::string& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < sizeof(kParamMagic) ||
      std::memcmp(data.data(), kParamMagic, sizeof(kParamMagic)) != 0)
    fail(ErrorCode::kVersionMismatch, path + ": not an ncdd parameter file");
  Cursor cur(data, path);
  for (std::size_t i = 0; i < sizeof(kParamMagic); ++i) cur.u8();
  const std::uint32_t version = cur.u32();
  if (version != 1)
    fail(ErrorCode::kVersionMismatch, path + ": unsupported parameter file version");

  const int n_nodes = static_cast<int>(cur.u32());
  ModelSpec spec;
  spec.k_iterations = static_cast<int>(cur.u32());
  spec.d0 = static_cast<int>(cur.u32());
  spec.inner_windows = static_cast<int>(cur.u32());
  spec.bins = static_cast<int>(cur.u32());
  spec.inner_len = static_cast<int>(cur.u32());
  spec.domain = cur.u8() == 0 ? Domain::kTime : Domain::kFrequency;
  spec.aggregator = cur.u8() == 0 ? AggregatorKind::kMean : AggregatorKind::kMax;
  spec.activation = cur.u8() == 0 ? Activation::kRelu : Activation::kSoftmax;
  const auto mode_of = [&](std::uint8_t v) {
    if (v > 2) fail(ErrorCode::kParse, path + ": bad parameter mode tag");
    return static_cast<ParamMode>(v);
  };
  spec.theta_mode = mode_of(cur.u8());
  spec.psi_mode = mode_of(cur.u8());
  for (int i = 0; i < 3; ++i) cur.u8();
  spec.cn_epsilon = cur.f64();
  const RngSeed seed{cur.u64()};
  for (int i = 0; i < 6; ++i) spec.band_sizes[static_cast<std::size_t>(i)] = static_cast<int>(cur.u32());
  const auto n_free = static_cast<Eigen::Index>(cur.u32());

  Eigen::MatrixXi adj(n_nodes, n_nodes);
  for (int u = 0; u < n_nodes; ++u)
    for (int v = 0; v < n_nodes; ++v) adj(u, v) = cur.u8();
  Eigen::VectorXd free_vars(n_free);
  for (Eigen::Index i = 0; i < n_free; ++i) free_vars(i) = cur.f64();
  cur.done();

  TrainableParameters params(spec, std::move(free_vars));
  params.set_seed(seed);
  return {std::move(params), Topology::from_adjacency(adj)};
}

void write_loss_trace(const std::string& path, const std::vector<double>& epoch_mean_loss) {
  auto out = open_out(path);
  out << "epoch,mean_loss\n";
  for (std::size_t i = 0; i < epoch_mean_loss.size(); ++i)
    out << (i + 1) << ',' << format_double(epoch_mean_loss[i]) << '\n';
}

std::vector<double> read_loss_trace(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "epoch,mean_loss")
    fail(ErrorCode::kParse, path + ": missing loss trace header");
  std::vector<double> trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) fail(ErrorCode::kParse, path + ": malformed trace row");
    trace.push_back(parse_double(std::string_view(line).substr(comma + 1), path, line_no));
  }
  return trace;
}

}  // namespace ncdd
