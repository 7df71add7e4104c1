#ifndef PNDM_CSV_HPP
#define PNDM_CSV_HPP

#include <string>

namespace pndm {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

}  // namespace pndm

#endif  // PNDM_CSV_HPP
