#include "sonni/workload.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sonni {

void SlotwiseModel::validate() const {
  if (coeffs.empty()) throw std::invalid_argument("model has no coefficients");
  for (const SlotVector& c : coeffs) {
    if (c.size() != coeffs[0].size())
      throw std::invalid_argument("coefficient vectors must share one length");
    if (!all_finite(c)) throw std::invalid_argument("model coefficient not finite");
  }
}

SlotwiseModel random_model(size_t width, size_t degree, double lo, double hi,
                           uint64_t seed) {
  if (degree < 1) throw std::invalid_argument("model degree must be at least 1");
  Rng rng(seed);
  SlotwiseModel model;
  model.coeffs.assign(degree + 1, SlotVector(width));
  for (size_t k = 0; k <= degree; ++k)
    for (size_t s = 0; s < width; ++s) model.coeffs[k][s] = rng.uniform(lo, hi);
  model.validate();
  return model;
}

SlotVector eval_plain(const SlotwiseModel& model, const SlotVector& input) {
  model.validate();
  if (input.size() != model.width())
    throw std::invalid_argument("input length does not match model width");
  size_t deg = model.degree();
  SlotVector out = model.coeffs[deg];
  for (size_t k = deg; k-- > 0;)
    for (size_t s = 0; s < input.size(); ++s)
      out[s] = out[s] * input[s] + model.coeffs[k][s];
  return out;
}

double eval_slot(const SlotwiseModel& model, size_t slot, double v) {
  size_t deg = model.degree();
  double acc = model.coeffs[deg].at(slot);
  for (size_t k = deg; k-- > 0;) acc = acc * v + model.coeffs[k][slot];
  return acc;
}

MockCiphertext eval_encrypted(Engine& eng,
                              const std::vector<MockCiphertext>& param_cts,
                              const MockCiphertext& input_ct) {
  if (param_cts.size() < 2)
    throw std::invalid_argument("need degree+1 >= 2 parameter ciphertexts");
  MockCiphertext acc = param_cts.back();
  for (size_t k = param_cts.size() - 1; k-- > 0;)
    acc = eng.add(eng.mult(acc, input_ct), param_cts[k]);
  return acc;
}

SlotVector gen_canaries(size_t m, double lo, double hi, uint64_t seed) {
  Rng rng(seed);
  SlotVector y(m);
  for (size_t j = 0; j < m; ++j) y[j] = rng.uniform(lo, hi);
  return y;
}

std::string model_to_json(const SlotwiseModel& model) {
  nlohmann::json j;
  j["degree"] = model.degree();
  j["width"] = model.width();
  j["owner"] = std::string(1, static_cast<char>(model.owner));
  j["coeffs"] = model.coeffs;
  return j.dump(2);
}

SlotwiseModel model_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SlotwiseModel model;
  model.coeffs = j.at("coeffs").get<std::vector<SlotVector>>();
  if (j.contains("owner")) {
    std::string o = j.at("owner").get<std::string>();
    if (o.size() != 1) throw std::invalid_argument("owner must be one character");
    model.owner = static_cast<KeyId>(o[0]);
  }
  model.validate();
  if (j.at("degree").get<size_t>() != model.degree() ||
      j.at("width").get<size_t>() != model.width())
    throw std::invalid_argument("model header disagrees with coefficient arrays");
  return model;
}

void save_model(const SlotwiseModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open model file for writing: " + path);
  out << model_to_json(model) << "\n";
}

SlotwiseModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace sonni
