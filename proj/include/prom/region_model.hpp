#pragma once

// The four pROM variants: a domain-wide global basis, a per-subdomain local
// basis, and two tangent-space interpolations inside a subdomain (entry-wise
// on Gamma_i, or on the coefficients Xi_i of Gamma_i in the region basis).

#include "prom/ecsw.hpp"
#include "prom/grassmann.hpp"
#include "prom/param_space.hpp"
#include "prom/pod.hpp"
#include "prom/reduced_system.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace prom {

enum class Variant { Global, Local, Entries, Coefficients };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::Global: return "global";
    case Variant::Local: return "local";
    case Variant::Entries: return "entries";
    case Variant::Coefficients: return "coefficients";
  }
  return "unknown";
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "global") return Variant::Global;
  if (s == "local") return Variant::Local;
  if (s == "entries") return Variant::Entries;
  if (s == "coefficients") return Variant::Coefficients;
  throw ConfigError("unknown variant '" + s + "' (expected global, local, entries or coefficients)");
}

template <typename Scalar = double>
struct RegionModel {
  Subdomain<Scalar> subdomain;
  std::vector<ReductionBasis<Scalar>> local_bases;  ///< one per training point
  ReductionBasis<Scalar> reference_basis;
  std::vector<TangentVector<Scalar>> tangent_locals;
  ReductionBasis<Scalar> global_region_basis;  ///< orthonormal basis of the stacked tangents
  std::vector<Mat<Scalar>> coeff_matrices;     ///< Xi_i = Vg^T Gamma_i
  ReductionBasis<Scalar> local_region_basis;   ///< POD of the subdomain's stacked snapshots
  std::optional<HyperMesh<Scalar>> hyper_mesh;

  Index order() const { return reference_basis.order(); }
  std::string id() const { return "subdomain-" + std::to_string(subdomain.id); }
};

/// One basis for the whole domain from all training snapshots.
template <typename Scalar>
ReductionBasis<Scalar> build_global(const std::vector<const SnapshotSet<Scalar>*>& snapshots, Index r) {
  return pod_basis(stack_snapshots(snapshots), r, Provenance::GlobalDomain, "domain");
}

/// `snapshots` aligned with `sub.training_points`. r_global = 0 keeps every
/// column of the stacked tangent matrix (capped at n).
template <typename Scalar>
RegionModel<Scalar> build_region(const Subdomain<Scalar>& sub,
                                 const std::vector<const SnapshotSet<Scalar>*>& snapshots, Index r_local,
                                 Index r_global = 0) {
  require(snapshots.size() == sub.training_points.size(),
          "one snapshot set per subdomain training point required");
  RegionModel<Scalar> rm;
  rm.subdomain = sub;
  for (auto* s : snapshots) rm.local_bases.push_back(local_basis(*s, r_local));
  rm.reference_basis = rm.local_bases[static_cast<std::size_t>(sub.reference_index)];
  rm.reference_basis.source = rm.id();

  std::vector<Mat<Scalar>> stacked;
  for (std::size_t i = 0; i < rm.local_bases.size(); ++i) {
    try {
      rm.tangent_locals.push_back(log_map(rm.reference_basis, rm.local_bases[i]));
    } catch (const NumericError& e) {
      throw NumericError(rm.id() + ", training point " + sub.training_points[i].str() + ": " + e.what());
    }
    stacked.push_back(rm.tangent_locals.back().matrix);
  }
  const Index n = rm.reference_basis.dofs();
  const Index total = static_cast<Index>(stacked.size()) * r_local;
  const Index rg = r_global > 0 ? std::min(r_global, total) : std::min(n, total);
  rm.global_region_basis = stack_and_compress(stacked, rg, rm.id());
  for (const auto& g : rm.tangent_locals) {
    rm.coeff_matrices.push_back(rm.global_region_basis.matrix.transpose() * g.matrix);
  }
  rm.local_region_basis = pod_basis(stack_snapshots(snapshots), r_local, Provenance::GlobalRegion, rm.id());
  return rm;
}

/// An interpolated basis plus the arithmetic spent in the interpolation
/// itself (the weighted sum over training points).
template <typename Scalar>
struct Interpolated {
  ReductionBasis<Scalar> basis;
  std::uint64_t interpolation_flops = 0;
  Vec<Scalar> weights;
};

template <typename Scalar>
Interpolated<Scalar> interpolate_coefficients(const RegionModel<Scalar>& rm, const Box<Scalar>& domain,
                                              const ParameterPoint<Scalar>& q) {
  if (!rm.subdomain.contains(domain, q)) throw DomainError(q.str() + " lies outside " + rm.id());
  Interpolated<Scalar> out;
  out.weights = interpolation_weights(domain, rm.subdomain, q);
  Mat<Scalar> xi = Mat<Scalar>::Zero(rm.coeff_matrices.front().rows(), rm.coeff_matrices.front().cols());
  for (std::size_t i = 0; i < rm.coeff_matrices.size(); ++i) {
    xi += out.weights(static_cast<Index>(i)) * rm.coeff_matrices[i];
  }
  out.interpolation_flops = 2ull * rm.coeff_matrices.size() * static_cast<std::uint64_t>(xi.size());
  out.basis = exp_map(rm.reference_basis, Mat<Scalar>(rm.global_region_basis.matrix * xi));
  return out;
}

template <typename Scalar>
Interpolated<Scalar> interpolate_entries(const RegionModel<Scalar>& rm, const Box<Scalar>& domain,
                                         const ParameterPoint<Scalar>& q) {
  if (!rm.subdomain.contains(domain, q)) throw DomainError(q.str() + " lies outside " + rm.id());
  Interpolated<Scalar> out;
  out.weights = interpolation_weights(domain, rm.subdomain, q);
  const auto& g0 = rm.tangent_locals.front().matrix;
  Mat<Scalar> gamma = Mat<Scalar>::Zero(g0.rows(), g0.cols());
  for (std::size_t i = 0; i < rm.tangent_locals.size(); ++i) {
    gamma += out.weights(static_cast<Index>(i)) * rm.tangent_locals[i].matrix;
  }
  out.interpolation_flops = 2ull * rm.tangent_locals.size() * static_cast<std::uint64_t>(gamma.size());
  out.basis = exp_map(rm.reference_basis, gamma);
  return out;
}

/// Basis used by `variant` at q. `global` is only consulted for Variant::Global.
template <typename Scalar>
ReductionBasis<Scalar> variant_basis(Variant variant, const RegionModel<Scalar>& rm, const Box<Scalar>& domain,
                                     const ParameterPoint<Scalar>& q, const ReductionBasis<Scalar>* global) {
  switch (variant) {
    case Variant::Global:
      require(global != nullptr, "global variant requested without a global basis");
      return *global;
    case Variant::Local:
      if (!rm.subdomain.contains(domain, q)) throw DomainError(q.str() + " lies outside " + rm.id());
      return rm.local_region_basis;
    case Variant::Entries: return interpolate_entries(rm, domain, q).basis;
    case Variant::Coefficients: return interpolate_coefficients(rm, domain, q).basis;
  }
  throw ConfigError("unknown variant");
}

/// Hyper mesh for a subdomain, trained on its reference basis.
template <typename Scalar>
HyperMesh<Scalar> train_region_mesh(const RegionModel<Scalar>& rm, const StructuralModel<Scalar>& model,
                                    const std::vector<const SnapshotSet<Scalar>*>& snapshots, Index stride,
                                    Scalar tau) {
  return train_hyper_mesh(model, snapshots, rm.reference_basis, stride, tau);
}

template <typename Scalar>
ReducedSystem<Scalar> query_coefficients(const RegionModel<Scalar>& rm, const Box<Scalar>& domain,
                                         const ParameterPoint<Scalar>& q, const StructuralModel<Scalar>& model,
                                         bool use_hyper = false) {
  auto b = interpolate_coefficients(rm, domain, q).basis;
  if (use_hyper && rm.hyper_mesh) {
    const auto mesh = rebind(*rm.hyper_mesh, b);
    return ReducedSystem<Scalar>(model, std::move(b), &mesh);
  }
  return ReducedSystem<Scalar>(model, std::move(b));
}

template <typename Scalar>
ReducedSystem<Scalar> query_entries(const RegionModel<Scalar>& rm, const Box<Scalar>& domain,
                                    const ParameterPoint<Scalar>& q, const StructuralModel<Scalar>& model,
                                    bool use_hyper = false) {
  auto b = interpolate_entries(rm, domain, q).basis;
  if (use_hyper && rm.hyper_mesh) {
    const auto mesh = rebind(*rm.hyper_mesh, b);
    return ReducedSystem<Scalar>(model, std::move(b), &mesh);
  }
  return ReducedSystem<Scalar>(model, std::move(b));
}

template <typename Scalar>
ReducedSystem<Scalar> query_local(const RegionModel<Scalar>& rm, const Box<Scalar>& domain,
                                  const ParameterPoint<Scalar>& q, const StructuralModel<Scalar>& model,
                                  bool use_hyper = false) {
  auto b = variant_basis(Variant::Local, rm, domain, q, static_cast<const ReductionBasis<Scalar>*>(nullptr));
  if (use_hyper && rm.hyper_mesh) {
    const auto mesh = rebind(*rm.hyper_mesh, b);
    return ReducedSystem<Scalar>(model, std::move(b), &mesh);
  }
  return ReducedSystem<Scalar>(model, std::move(b));
}

}  // namespace prom
