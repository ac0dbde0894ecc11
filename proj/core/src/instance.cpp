#include "mineig/instance.hpp"

#include "mineig/error.hpp"

namespace mineig {

Instance make_instance(Vectorset vectors, std::shared_ptr<const Matroid> matroid,
                       std::string name, std::string provenance) {
  if (!matroid) throw Error(ErrorCode::kInvalidArgument, "instance needs a matroid");
  if (matroid->ground_size() != vectors.size()) {
    throw Error(ErrorCode::kInvalidArgument, "matroid ground size differs from vector count");
  }
  return Instance{std::move(vectors), std::move(matroid), std::move(name), std::move(provenance)};
}

}  // namespace mineig
