#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Geometry>

#include "affcorr/affine.hpp"
#include "affcorr/errors.hpp"
#include "affcorr/geometry.hpp"
#include "affcorr/normal_estimation.hpp"
#include "affcorr/numeric_oracle.hpp"
#include "affcorr/record.hpp"
#include "affcorr/record_io.hpp"
#include "affcorr/scene_sim.hpp"

namespace {

using affcorr::AffineCorrespondence;
using affcorr::AffineResult;
using affcorr::CorrespondenceRecord;
using affcorr::Matrix2;
using affcorr::Matrix3;
using affcorr::PlaneParams;
using affcorr::Pose;
using affcorr::Vector2;
using affcorr::Vector3;

constexpr int kExitRecordFailures = 1;
constexpr int kExitIo = 3;
constexpr double kTransferTol = 1e-9;
constexpr double kEpipolarTol = 1e-9;

struct IoError {
  std::string message;
};

class InputStream {
 public:
  explicit InputStream(const std::string& path) {
    if (path == "-") {
      stream_ = &std::cin;
      return;
    }
    file_.open(path);
    if (!file_) throw IoError{"cannot open input file '" + path + "'"};
    stream_ = &file_;
  }

  bool next_line(std::string& line) { return bool(std::getline(*stream_, line)); }

 private:
  std::ifstream file_;
  std::istream* stream_ = nullptr;
};

class OutputStream {
 public:
  explicit OutputStream(const std::string& path) : path_(path) {
    if (path == "-") {
      stream_ = &std::cout;
      return;
    }
    file_.open(path, std::ios::trunc);
    if (!file_) throw IoError{"cannot open output file '" + path + "'"};
    stream_ = &file_;
  }

  void write_line(const std::string& line) {
    *stream_ << line << '\n';
    if (!*stream_) throw IoError{"write failed on '" + path_ + "'"};
  }

  void finish() {
    stream_->flush();
    if (!*stream_) throw IoError{"write failed on '" + path_ + "'"};
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

void append_json_string(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

// Failed records go to the sidecar (a file when --sidecar is given, standard
// error otherwise) tagged with the input line number and a reason code.
class Sidecar {
 public:
  explicit Sidecar(const std::string& path) : path_(path) {}

  void report(std::size_t line_no, const std::string& reason,
              const std::string& detail) {
    ++count_;
    std::string entry = "{\"line\":";
    entry += std::to_string(line_no);
    entry += ",\"reason\":";
    append_json_string(entry, reason);
    entry += ",\"detail\":";
    append_json_string(entry, detail);
    entry += '}';
    if (path_.empty()) {
      std::cerr << entry << '\n';
      return;
    }
    if (!file_.is_open()) {
      file_.open(path_, std::ios::trunc);
      if (!file_) throw IoError{"cannot open sidecar file '" + path_ + "'"};
    }
    file_ << entry << '\n';
    if (!file_) throw IoError{"write failed on sidecar '" + path_ + "'"};
  }

  std::size_t count() const { return count_; }

 private:
  std::string path_;
  std::ofstream file_;
  std::size_t count_ = 0;
};

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

// Shared stream loop: parse each line, apply `transform`, keep input order.
int run_record_pipeline(
    const std::string& in_path, const std::string& out_path,
    const std::string& sidecar_path,
    const std::function<CorrespondenceRecord(const CorrespondenceRecord&)>&
        transform) {
  InputStream in(in_path);
  OutputStream out(out_path);
  Sidecar sidecar(sidecar_path);

  std::string line;
  std::size_t line_no = 0;
  while (in.next_line(line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      const CorrespondenceRecord record = affcorr::parse_record(line);
      out.write_line(affcorr::to_json_line(transform(record)));
    } catch (const affcorr::Error& e) {
      sidecar.report(line_no, e.code(), e.what());
    }
  }
  out.finish();
  return sidecar.count() == 0 ? 0 : kExitRecordFailures;
}

struct SimulateOpts {
  affcorr::SimConfig cfg;
  std::string out = "-";
};

int run_simulate(const SimulateOpts& opts) {
  try {
    affcorr::validate(opts.cfg);
  } catch (const affcorr::InvalidConfig& e) {
    std::cerr << "affcorr simulate: " << e.what() << '\n';
    return 2;
  }
  OutputStream out(opts.out);
  for (int index = 0; index < opts.cfg.scene_count; ++index) {
    const affcorr::SceneSample scene =
        affcorr::generate_scene(opts.cfg, std::uint64_t(index));
    for (const CorrespondenceRecord& record : affcorr::scene_to_records(scene))
      out.write_line(affcorr::to_json_line(record));
  }
  out.finish();
  return 0;
}

CorrespondenceRecord apply_affine(const CorrespondenceRecord& record) {
  if (!record.normal || !record.distance)
    throw affcorr::RecordError("missing-field",
                               "fields 'n' and 'd' required to compute A");
  const Pose<double> pose{record.rotation, record.translation};
  const PlaneParams<double> plane(*record.normal, *record.distance);
  const AffineResult<double> result =
      affcorr::affine_elementwise(pose, plane, record.p1);
  CorrespondenceRecord out = record;
  out.p2 = result.p2;
  out.affine = result.affine;
  out.s = result.s;
  return out;
}

CorrespondenceRecord apply_estimate_normal(const CorrespondenceRecord& record) {
  if (!record.p2)
    throw affcorr::RecordError("missing-field",
                               "field 'p2' required to estimate the normal");
  if (!record.affine)
    throw affcorr::RecordError("missing-field",
                               "field 'A' required to estimate the normal");
  if (std::abs(record.affine->determinant()) <= 1e-12)
    throw affcorr::RecordError("degenerate-affine",
                               "field 'A' is numerically singular");
  const Pose<double> pose{record.rotation, record.translation};
  const AffineCorrespondence<double> ac{record.p1, *record.p2, *record.affine};
  const affcorr::NormalEstimate<double> estimate =
      affcorr::estimate_normal(pose, ac);

  CorrespondenceRecord out = record;
  out.normal_est = estimate.normal;
  out.distance_est = estimate.distance;
  out.residual = estimate.residual;
  out.conditioning = estimate.conditioning;  // serialized as null if infinite

  if (record.normal && record.distance) {
    const PlaneParams<double> truth(*record.normal, *record.distance);
    Vector3<double> n_true = truth.normal();
    double d_true = truth.distance();
    if (d_true < 0.0) {  // compare in the d > 0 representation
      n_true = -n_true;
      d_true = -d_true;
    }
    const Vector3<double> n_est = estimate.normal;
    out.normal_error_rad =
        std::atan2(n_est.cross(n_true).norm(), n_est.dot(n_true));
    out.distance_error_rel = std::abs(estimate.distance - d_true) / d_true;
  }
  return out;
}

struct ValidateOpts {
  std::string in = "-";
  double eps = 1e-6;
  double tol_fd = 1e-6;
  double tol_algebraic = 1e-14;
};

struct FailureDetail {
  std::size_t line;
  std::vector<std::string> checks;
};

// Runs the element-wise path, the assembled decomposition, the numerical
// Jacobian and the 3D transfer on every record and cross-checks them, plus
// the epipolar residual and any carried p2/A fields.
int run_validate(const ValidateOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  InputStream in(opts.in);

  std::size_t records = 0;
  std::vector<FailureDetail> failures;
  double max_fd = 0.0, max_alg = 0.0, max_transfer = 0.0, max_epipolar = 0.0;

  std::string line;
  std::size_t line_no = 0;
  while (in.next_line(line)) {
    ++line_no;
    if (is_blank(line)) continue;
    ++records;
    std::vector<std::string> failed;
    try {
      const CorrespondenceRecord record = affcorr::parse_record(line);
      if (!record.normal || !record.distance)
        throw affcorr::RecordError("missing-field",
                                   "fields 'n' and 'd' required to validate");
      const Pose<double> pose{record.rotation, record.translation};
      const PlaneParams<double> plane(*record.normal, *record.distance);

      const AffineResult<double> elementwise =
          affcorr::affine_elementwise(pose, plane, record.p1);
      const Matrix2<double> unified =
          affcorr::affine_unified(pose, plane, record.p1, elementwise.p2)
              .assemble();
      const Matrix2<double> fd = affcorr::fd_jacobian(
          affcorr::homography_from_pose_plane(pose, plane), record.p1,
          affcorr::FiniteDiffConfig<double>{opts.eps,
                                            affcorr::FdScheme::kCentral});
      const Vector2<double> p2_3d =
          affcorr::transfer_via_3d(pose, plane, record.p1);

      double alg = (elementwise.affine - unified).cwiseAbs().maxCoeff();
      if (record.affine)
        alg = std::max(
            alg, (elementwise.affine - *record.affine).cwiseAbs().maxCoeff());
      const double scale =
          std::max(1.0, elementwise.affine.cwiseAbs().rowwise().sum().maxCoeff());
      const double fd_err =
          (elementwise.affine - fd).cwiseAbs().maxCoeff() / scale;
      double transfer = (elementwise.p2 - p2_3d).cwiseAbs().maxCoeff();
      if (record.p2)
        transfer = std::max(
            transfer, (elementwise.p2 - *record.p2).cwiseAbs().maxCoeff());
      double epipolar = 0.0;
      if (record.translation.norm() > affcorr::kDegeneracyEps)
        epipolar = affcorr::epipolar_residual(
            affcorr::essential_from_pose(pose), record.p1, elementwise.p2);

      max_alg = std::max(max_alg, alg);
      max_fd = std::max(max_fd, fd_err);
      max_transfer = std::max(max_transfer, transfer);
      max_epipolar = std::max(max_epipolar, epipolar);

      if (alg > opts.tol_algebraic) failed.push_back("algebraic-identity");
      if (fd_err > opts.tol_fd) failed.push_back("finite-difference");
      if (transfer > kTransferTol) failed.push_back("transfer");
      if (epipolar > kEpipolarTol) failed.push_back("epipolar");
    } catch (const affcorr::Error& e) {
      failed.push_back(e.code());
    }
    if (!failed.empty()) failures.push_back({line_no, std::move(failed)});
  }

  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;

  std::string report = "{\"records\":";
  report += std::to_string(records);
  report += ",\"failures\":";
  report += std::to_string(failures.size());
  report += ",\"max_algebraic_error\":";
  affcorr::append_number(report, max_alg);
  report += ",\"max_fd_error\":";
  affcorr::append_number(report, max_fd);
  report += ",\"max_transfer_error\":";
  affcorr::append_number(report, max_transfer);
  report += ",\"max_epipolar_residual\":";
  affcorr::append_number(report, max_epipolar);
  report += ",\"failure_detail\":[";
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (i > 0) report += ',';
    report += "{\"line\":";
    report += std::to_string(failures[i].line);
    report += ",\"checks\":[";
    for (std::size_t j = 0; j < failures[i].checks.size(); ++j) {
      if (j > 0) report += ',';
      append_json_string(report, failures[i].checks[j]);
    }
    report += "]}";
  }
  report += "],\"wall_time_seconds\":";
  affcorr::append_number(report, elapsed.count());
  report += '}';
  std::cout << report << std::endl;
  return failures.empty() ? 0 : kExitRecordFailures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "affcorr: exact local affine transformations between two calibrated "
      "views, with numerical cross-checks and plane-normal recovery"};
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "generate synthetic correspondence records");
  simulate->add_option("--seed", sim.cfg.seed, "RNG seed");
  simulate->add_option("--scenes", sim.cfg.scene_count, "number of scenes")
      ->check(CLI::NonNegativeNumber);
  simulate
      ->add_option("--points", sim.cfg.points_per_scene, "points per scene")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--rot-bound", sim.cfg.rotation_bound_rad,
                       "max rotation angle [rad]");
  simulate->add_option("--trans-bound", sim.cfg.translation_bound,
                       "max translation norm");
  simulate->add_option("--depth-min", sim.cfg.depth_min, "min point depth");
  simulate->add_option("--depth-max", sim.cfg.depth_max, "max point depth");
  simulate->add_option("--cone-angle", sim.cfg.normal_cone_half_angle_rad,
                       "half-angle of the plane-normal cone [rad]");
  simulate->add_option("--out", sim.out, "output path or '-'");

  std::string affine_in = "-", affine_out = "-", affine_sidecar;
  CLI::App* affine = app.add_subcommand(
      "affine", "attach the closed-form affine map to each record");
  affine->add_option("--in", affine_in, "input path or '-'");
  affine->add_option("--out", affine_out, "output path or '-'");
  affine->add_option("--sidecar", affine_sidecar,
                     "failed-record destination (default: stderr)");

  ValidateOpts val;
  CLI::App* validate = app.add_subcommand(
      "validate", "cross-check every record against the numerical oracles");
  validate->add_option("--in", val.in, "input path or '-'");
  validate->add_option("--eps", val.eps, "finite-difference step");
  validate->add_option("--tol-fd", val.tol_fd,
                       "relative tolerance vs the numerical Jacobian");
  validate->add_option("--tol-algebraic", val.tol_algebraic,
                       "entrywise tolerance between the closed-form paths");

  std::string est_in = "-", est_out = "-", est_sidecar;
  CLI::App* estimate = app.add_subcommand(
      "estimate-normal", "recover plane normal and distance from each record");
  estimate->add_option("--in", est_in, "input path or '-'");
  estimate->add_option("--out", est_out, "output path or '-'");
  estimate->add_option("--sidecar", est_sidecar,
                       "failed-record destination (default: stderr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (affine->parsed())
      return run_record_pipeline(affine_in, affine_out, affine_sidecar,
                                 apply_affine);
    if (validate->parsed()) return run_validate(val);
    if (estimate->parsed())
      return run_record_pipeline(est_in, est_out, est_sidecar,
                                 apply_estimate_normal);
  } catch (const IoError& e) {
    std::cerr << "affcorr: " << e.message << '\n';
    return kExitIo;
  } catch (const affcorr::Error& e) {
    std::cerr << "affcorr: " << e.what() << '\n';
    return kExitRecordFailures;
  }
  return 0;
}
