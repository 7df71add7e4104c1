#include "pndm/csv.hpp"

#include <charconv>

namespace pndm {

std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace pndm
