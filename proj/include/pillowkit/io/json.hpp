#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>

#include <json.hpp>
#include "pillowkit/cert/cert.hpp"
#include "pillowkit/knots/reps.hpp"
#include "pillowkit/torus/program.hpp"

namespace pillowkit::io {

using nlohmann::json;

/// Serialized documents carry this version.
inline constexpr int kFormatVersion = 1;

/// Pretty JSON with every float written as a 17-significant-digit decimal.
/// Non-finite floats throw std::domain_error.
std::string dump(const json& j, int indent = 2);
std::string format_double(double v);

/// Throws SchemaError on malformed JSON or an unreadable file.
json parse(const std::string& text);
json read_file(const std::filesystem::path& path);

/// Strict object access: every key must be read or listed before finish(),
/// otherwise SchemaError names the first unknown key.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where);
  bool has(const std::string& key) const;
  const json& at(const std::string& key);
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  long integer(const std::string& key);
  long integer(const std::string& key, long fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  bool boolean(const std::string& key, bool fallback);
  void allow(std::initializer_list<const char*> keys);
  void finish() const;
  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::vector<std::string> seen_;
};

double as_number(const json& j, const std::string& where);
long as_integer(const json& j, const std::string& where);

json to_json(const torus::Vec2& v);
torus::Vec2 vec2_from_json(const json& j, const std::string& where);
torus::Int2 int2_from_json(const json& j, const std::string& where);

// Fields and programs.
json to_json(const torus::FourierField& f);
/// {"terms": [{"k": [a, b], "u_sin": [x, y], "u_cos": [x, y]}], "mean": [x, y]}.
/// Amplitudes are projected orthogonal to k; a component along k larger
/// than div_tol throws DivergenceTooLarge.
torus::FourierField fourier_field_from_json(const json& j, const std::string& where, double div_tol = 1e-8);
/// Field specs: {"type": "fourier" | "blend" | "named" | "gridded", ...}.
torus::TimeField time_field_from_json(const json& j, double div_tol = 1e-8);
json to_json(const torus::ShearingProfile& f);
torus::ShearingProfile profile_from_json(const json& j, const std::string& where);
json to_json(const torus::ShearingMap& m);
torus::ShearingMap shearing_map_from_json(const json& j, const std::string& where);
json to_json(const torus::ShearingProgram& p);
torus::ShearingProgram program_from_json(const json& j);
json to_json(const torus::ErrorCertificate& c);

// Knots.
json to_json(const knots::Presentation& p);
knots::Presentation presentation_from_json(const json& j, const std::string& where);
json to_json(const knots::KnotSpec& s);
knots::KnotSpec knot_spec_from_json(const json& j, const std::string& where);
json to_json(const knots::SU2& q);
json to_json(const knots::RepAssignment& r);
json to_json(const pillowcase::CylinderCurve& c);
pillowcase::CylinderCurve curve_from_json(const json& j, const std::string& where);
json to_json(const knots::ImageCurve& c);
json to_json(const knots::SliceHit& h);
json to_json(const knots::SpliceRep& r);

// Certificates.
json to_json(const cert::Certificate& c);
cert::Certificate certificate_from_json(const json& j);

}  // namespace pillowkit::io
