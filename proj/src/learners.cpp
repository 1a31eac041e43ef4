#include "ikf/learners.hpp"

namespace ikf {

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Knn: return "knn";
    case ModelKind::GaussianNb: return "nb";
    case ModelKind::Constant: return "constant";
  }
  return "unknown";
}

std::optional<ModelKind> model_from_string(std::string_view name) noexcept {
  if (name == "knn") return ModelKind::Knn;
  if (name == "nb" || name == "gaussian_nb") return ModelKind::GaussianNb;
  if (name == "constant") return ModelKind::Constant;
  return std::nullopt;
}

}  // namespace ikf
