#include "coldrec/fusion.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace coldrec {

FusionMethod parse_fusion_method(std::string_view name) {
  if (name == "concat") return FusionMethod::concat;
  if (name == "sum") return FusionMethod::sum;
  if (name == "max") return FusionMethod::max;
  throw std::invalid_argument("unknown fusion method '" + std::string(name) + "'");
}

std::string_view to_string(FusionMethod m) {
  switch (m) {
    case FusionMethod::concat: return "concat";
    case FusionMethod::sum: return "sum";
    case FusionMethod::max: return "max";
  }
  return "?";
}

void FusionSpec::validate(std::span<const Index> input_dims) const {
  if (input_dims.size() < 2) throw std::invalid_argument("fusion needs at least two inputs");
  if (reduce_dim) {
    const Index smallest = *std::min_element(input_dims.begin(), input_dims.end());
    if (*reduce_dim < 1 || *reduce_dim > smallest) {
      throw std::invalid_argument("reduce_dim " + std::to_string(*reduce_dim) +
                                  " must be in [1, " + std::to_string(smallest) + "]");
    }
  }
}

namespace {

std::vector<Index> dims_of(std::span<const FeatureMatrix> inputs) {
  std::vector<Index> dims;
  for (const auto& m : inputs) dims.push_back(m.dim());
  return dims;
}

void check_aligned(std::span<const FeatureMatrix> inputs) {
  if (inputs.size() < 2) throw std::invalid_argument("fusion needs at least two inputs");
  const auto& ref = inputs.front();
  for (std::size_t k = 1; k < inputs.size(); ++k) {
    if (inputs[k].n_items() != ref.n_items()) {
      throw std::invalid_argument("fusion input " + std::to_string(k) + " has " +
                                  std::to_string(inputs[k].n_items()) + " items, expected " +
                                  std::to_string(ref.n_items()));
    }
    if (!inputs[k].item_ids.empty() && !ref.item_ids.empty() && inputs[k].item_ids != ref.item_ids) {
      throw std::invalid_argument("fusion input " + std::to_string(k) + " is not aligned with input 0");
    }
  }
}

Index target_dim(std::span<const FeatureMatrix> inputs, std::optional<Index> reduce_dim) {
  const auto dims = dims_of(inputs);
  const Index smallest = *std::min_element(dims.begin(), dims.end());
  if (!reduce_dim) return smallest;
  if (*reduce_dim < 1 || *reduce_dim > smallest) {
    throw std::invalid_argument("reduce_dim " + std::to_string(*reduce_dim) + " must be in [1, " +
                                std::to_string(smallest) + "]");
  }
  return *reduce_dim;
}

template <typename Combine>
FeatureMatrix fuse_elementwise(std::span<const FeatureMatrix> inputs, bool renormalize,
                               std::optional<Index> reduce_dim, Combine combine) {
  check_aligned(inputs);
  const auto reduced = reduce_to_common_dim(inputs, target_dim(inputs, reduce_dim));
  FeatureMatrix out;
  out.item_ids = inputs.front().item_ids;
  out.values = reduced.front().values;
  for (std::size_t k = 1; k < reduced.size(); ++k) combine(out.values, reduced[k].values);
  if (renormalize) l2_normalize_rows(out.values);
  return out;
}

}  // namespace

std::vector<FeatureMatrix> reduce_to_common_dim(std::span<const FeatureMatrix> inputs, Index target) {
  std::vector<FeatureMatrix> out;
  out.reserve(inputs.size());
  for (const auto& m : inputs) {
    if (m.dim() == target) {
      out.push_back(m);
    } else if (m.dim() > target) {
      out.push_back(fit_apply_pca(m, target));
    } else {
      throw std::invalid_argument("cannot reduce dim " + std::to_string(m.dim()) + " up to " + std::to_string(target));
    }
  }
  return out;
}

FeatureMatrix fuse_concat(std::span<const FeatureMatrix> inputs, bool renormalize) {
  check_aligned(inputs);
  Index total = 0;
  for (const auto& m : inputs) total += m.dim();
  FeatureMatrix out;
  out.item_ids = inputs.front().item_ids;
  out.values.resize(inputs.front().n_items(), total);
  Index offset = 0;
  for (const auto& m : inputs) {
    out.values.middleCols(offset, m.dim()) = m.values;
    offset += m.dim();
  }
  if (renormalize) l2_normalize_rows(out.values);
  return out;
}

FeatureMatrix fuse_sum(std::span<const FeatureMatrix> inputs, bool renormalize, std::optional<Index> reduce_dim) {
  return fuse_elementwise(inputs, renormalize, reduce_dim, [](RowMatrix& acc, const RowMatrix& m) { acc += m; });
}

FeatureMatrix fuse_max(std::span<const FeatureMatrix> inputs, bool renormalize, std::optional<Index> reduce_dim) {
  return fuse_elementwise(inputs, renormalize, reduce_dim,
                          [](RowMatrix& acc, const RowMatrix& m) { acc = acc.cwiseMax(m); });
}

FeatureMatrix fuse(const FusionSpec& spec, std::span<const FeatureMatrix> inputs) {
  const auto dims = dims_of(inputs);
  spec.validate(dims);
  switch (spec.method) {
    case FusionMethod::concat: return fuse_concat(inputs, spec.renormalize);
    case FusionMethod::sum: return fuse_sum(inputs, spec.renormalize, spec.reduce_dim);
    case FusionMethod::max: return fuse_max(inputs, spec.renormalize, spec.reduce_dim);
  }
  throw std::logic_error("fuse: bad method");
}

}  // namespace coldrec
