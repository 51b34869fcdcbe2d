#include "affcorr/record_io.hpp"

#include <charconv>
#include <cmath>

#include <json.hpp>

#include "affcorr/errors.hpp"
#include "affcorr/geometry.hpp"

namespace affcorr {

namespace {

using nlohmann::json;

void append_array(std::string& out, const double* values, int count) {
  out += '[';
  for (int i = 0; i < count; ++i) {
    if (i > 0) out += ',';
    append_number(out, values[i]);
  }
  out += ']';
}

void append_field_prefix(std::string& out, const char* name, bool& first) {
  if (!first) out += ',';
  first = false;
  out += '"';
  out += name;
  out += "\":";
}

template <typename Derived>
void append_matrix_field(std::string& out, const char* name, bool& first,
                         const Eigen::MatrixBase<Derived>& m) {
  append_field_prefix(out, name, first);
  Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime,
                (Derived::ColsAtCompileTime > 1 ? Eigen::RowMajor
                                                : Eigen::ColMajor)>
      row_major = m;
  append_array(out, row_major.data(), int(m.size()));
}

void append_scalar_field(std::string& out, const char* name, bool& first,
                         double v) {
  append_field_prefix(out, name, first);
  append_number(out, v);
}

double get_finite_number(const json& j, const char* name) {
  if (!j.is_number())
    throw RecordError("parse-error",
                      std::string("field '") + name + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v))
    throw RecordError("non-finite",
                      std::string("field '") + name + "' is not finite");
  return v;
}

template <int N>
Eigen::Matrix<double, N, 1> get_vector(const json& j, const char* name) {
  if (!j.is_array() || j.size() != N)
    throw RecordError("parse-error", std::string("field '") + name +
                                         "' must be an array of " +
                                         std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out(i) = get_finite_number(j[i], name);
  return out;
}

template <int N>
Eigen::Matrix<double, N, N> get_square(const json& j, const char* name) {
  const Eigen::Matrix<double, N * N, 1> flat = get_vector<N * N>(j, name);
  Eigen::Matrix<double, N, N> out;
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) out(r, c) = flat(r * N + c);
  return out;
}

}  // namespace

void append_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
  out.append(buffer, result.ptr);
}

std::string to_json_line(const CorrespondenceRecord& r) {
  std::string out;
  out.reserve(512);
  out += '{';
  bool first = true;
  append_matrix_field(out, "R", first, r.rotation);
  append_matrix_field(out, "t", first, r.translation);
  if (r.normal) append_matrix_field(out, "n", first, *r.normal);
  if (r.distance) append_scalar_field(out, "d", first, *r.distance);
  append_matrix_field(out, "p1", first, r.p1);
  if (r.p2) append_matrix_field(out, "p2", first, *r.p2);
  if (r.affine) append_matrix_field(out, "A", first, *r.affine);
  if (r.s) append_scalar_field(out, "s", first, *r.s);
  if (r.residual) append_scalar_field(out, "residual", first, *r.residual);
  if (r.normal_est) append_matrix_field(out, "n_est", first, *r.normal_est);
  if (r.distance_est) append_scalar_field(out, "d_est", first, *r.distance_est);
  if (r.conditioning)
    append_scalar_field(out, "conditioning", first, *r.conditioning);
  if (r.normal_error_rad)
    append_scalar_field(out, "n_err_rad", first, *r.normal_error_rad);
  if (r.distance_error_rel)
    append_scalar_field(out, "d_err_rel", first, *r.distance_error_rel);
  out += '}';
  return out;
}

CorrespondenceRecord parse_record(const std::string& line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw RecordError("parse-error", e.what());
  }
  if (!doc.is_object())
    throw RecordError("parse-error", "record line must be a JSON object");

  CorrespondenceRecord record;
  bool has_r = false, has_t = false, has_p1 = false;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_null()) continue;  // null marks an absent optional
    if (key == "R") {
      record.rotation = get_square<3>(value, "R");
      has_r = true;
    } else if (key == "t") {
      record.translation = get_vector<3>(value, "t");
      has_t = true;
    } else if (key == "n") {
      record.normal = get_vector<3>(value, "n");
    } else if (key == "d") {
      record.distance = get_finite_number(value, "d");
    } else if (key == "p1") {
      record.p1 = get_vector<2>(value, "p1");
      has_p1 = true;
    } else if (key == "p2") {
      record.p2 = get_vector<2>(value, "p2");
    } else if (key == "A") {
      record.affine = get_square<2>(value, "A");
    } else if (key == "s") {
      record.s = get_finite_number(value, "s");
    } else if (key == "residual") {
      record.residual = get_finite_number(value, "residual");
    } else if (key == "n_est") {
      record.normal_est = get_vector<3>(value, "n_est");
    } else if (key == "d_est") {
      record.distance_est = get_finite_number(value, "d_est");
    } else if (key == "conditioning") {
      record.conditioning = get_finite_number(value, "conditioning");
    } else if (key == "n_err_rad") {
      record.normal_error_rad = get_finite_number(value, "n_err_rad");
    } else if (key == "d_err_rel") {
      record.distance_error_rel = get_finite_number(value, "d_err_rel");
    } else {
      throw RecordError("parse-error", "unknown field '" + key + "'");
    }
  }

  if (!has_r) throw RecordError("missing-field", "required field 'R' missing");
  if (!has_t) throw RecordError("missing-field", "required field 't' missing");
  if (!has_p1)
    throw RecordError("missing-field", "required field 'p1' missing");
  if (record.normal.has_value() != record.distance.has_value())
    throw RecordError("missing-field", "fields 'n' and 'd' must come together");

  if (!is_rotation_matrix(record.rotation))
    throw RecordError("invalid-rotation",
                      "field 'R' is not a rotation matrix (orthonormality or "
                      "determinant check failed at 1e-9)");
  if (record.normal) {
    try {
      PlaneParams<double>(*record.normal, *record.distance);
    } catch (const DegeneratePlane& e) {
      throw RecordError("degenerate-plane", e.what());
    }
  }
  return record;
}

}  // namespace affcorr
