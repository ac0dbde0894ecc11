#pragma once

#include <memory>
#include <string>

#include "mineig/matroid.hpp"
#include "mineig/spectral.hpp"

namespace mineig {

// Vectors v_1..v_n together with a matroid over their indices.
struct Instance {
  Vectorset vectors;
  std::shared_ptr<const Matroid> matroid;
  std::string name;
  // Origin tag; "ks-lift" marks instances built from a unit decomposition.
  std::string provenance;

  std::size_t size() const noexcept { return vectors.size(); }
  std::size_t dim() const noexcept { return vectors.dim(); }
};

// Throws InvalidArgument if the matroid is missing or its ground set does
// not match the vector count.
Instance make_instance(Vectorset vectors, std::shared_ptr<const Matroid> matroid,
                       std::string name = {}, std::string provenance = {});

}  // namespace mineig
