#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace th::detail {

// Generating vector of a rank-1 lattice rule with n points in dimension d.
// d = 1 gives the equispaced rule; higher d uses a Korobov vector chosen by
// minimizing the P_2 figure of merit.
std::vector<std::uint64_t> lattice_generator(std::size_t n, std::size_t d);

// Smallest prime >= n. Prime point counts keep every sum of generator entries
// invertible, so integrands that depend on a combination of angles do not alias.
std::size_t lattice_size(std::size_t n);

// Point j of the shifted lattice, coordinates in [0,1).
void lattice_point(const std::vector<std::uint64_t>& g, std::size_t n, std::size_t j, const std::vector<double>& shift,
                   std::vector<double>& out);

}  // namespace th::detail
