#include "lieflow/cartan.hpp"

#include <algorithm>
#include <sstream>

namespace lieflow {

CartanData cartan_an(int rank) {
  if (rank < 1) throw ConstructionError("rank must be at least 1");
  CartanData out;
  out.rank = rank;
  out.matrix = Eigen::MatrixXi::Zero(rank, rank);
  for (int i = 0; i < rank; ++i) {
    out.matrix(i, i) = 2;
    if (i + 1 < rank) {
      out.matrix(i, i + 1) = -1;
      out.matrix(i + 1, i) = -1;
    }
  }
  // (K^-1)_{ij} = min(i,j) (rank+1-max(i,j)) / (rank+1), 1-based indices.
  out.inverse = MatQ::Zero(rank, rank);
  for (int i = 1; i <= rank; ++i)
    for (int j = 1; j <= rank; ++j)
      out.inverse(i - 1, j - 1) = rat(static_cast<long>(std::min(i, j)) * (rank + 1 - std::max(i, j)), rank + 1);
  return out;
}

GradingVector parse_grading(const std::string& text, int rank) {
  std::string clean = text;
  clean.erase(std::remove_if(clean.begin(), clean.end(),
                             [](unsigned char ch) { return std::isspace(ch); }),
              clean.end());
  GradingVector c;
  if (clean.find(',') == std::string::npos) {
    for (char ch : clean) {
      if (ch == '0')
        c.push_back(0);
      else if (ch == '1')
        c.push_back(1);
      else
        throw ConstructionError(std::string("grading entries must be 0 or 1, got '") + ch + "'");
    }
  } else {
    std::stringstream ss(clean);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "0")
        c.push_back(0);
      else if (tok == "1")
        c.push_back(1);
      else
        throw ConstructionError("grading entries must be 0 or 1, got '" + tok + "'");
    }
  }
  if (static_cast<int>(c.size()) != rank)
    throw ConstructionError("grading has " + std::to_string(c.size()) + " entries, expected " +
                            std::to_string(rank));
  if (std::all_of(c.begin(), c.end(), [](int v) { return v == 0; }))
    throw ConstructionError("grading vector must select at least one black root");
  return c;
}

VecQ grading_coefficients(const CartanData& cartan, const GradingVector& c) {
  if (static_cast<int>(c.size()) != cartan.rank)
    throw ConstructionError("grading length does not match rank");
  VecQ cv(cartan.rank);
  for (int i = 0; i < cartan.rank; ++i) cv(i) = c[i];
  return cartan.inverse * cv;
}

RedBlockDecomposition decompose_red_blocks(const GradingVector& c) {
  if (c.empty()) throw ConstructionError("empty grading vector");
  for (int v : c)
    if (v != 0 && v != 1) throw ConstructionError("grading entries must be 0 or 1");
  RedBlockDecomposition out;
  int i = 0, rank = static_cast<int>(c.size());
  while (i < rank) {
    if (c[i] == 1) {
      out.black_roots.push_back(i + 1);
      ++i;
      continue;
    }
    int start = i;
    while (i < rank && c[i] == 0) ++i;
    out.blocks.push_back(RedBlock{start + 1, i - start});
  }
  if (out.black_roots.empty())
    throw ConstructionError("grading vector must select at least one black root");
  return out;
}

SiteLattice build_site_lattice(int rank, const GradingVector& c) {
  auto dec = decompose_red_blocks(c);
  if (static_cast<int>(c.size()) != rank) throw ConstructionError("grading length does not match rank");
  SiteLattice lat;
  lat.rank = rank;
  lat.grading = c;
  std::vector<int> fence;  // black roots framed by sentinels 0 and rank+1
  fence.push_back(0);
  for (int b : dec.black_roots) fence.push_back(b);
  fence.push_back(rank + 1);
  for (std::size_t s = 0; s + 1 < fence.size(); ++s) {
    RedBlock blk;
    blk.m = fence[s] + 1;
    blk.R = fence[s + 1] - fence[s] - 1;
    lat.sites.push_back(blk);
  }
  // A trailing zero run already forms the last site; otherwise the last site
  // is the R=0 gap after the final black root (m = rank+1).
  return lat;
}

}  // namespace lieflow
