#ifndef CKN_ERRORS_HPP
#define CKN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ckn {

// Argument outside the domain of a weight or envelope (t <= 0, t > eta, ...).
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Structurally invalid weight description (bad parameters, bad table, ...).
struct spec_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation requires a weight vanishing or blowing up at the origin; the
// given weight has a finite positive limit or could not be classified.
struct unsupported_class_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested level lies in the image of an envelope plateau, where the
// inverse is set-valued.
struct plateau_image_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Test function support touches the boundary of the working interval.
struct support_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A theorem hypothesis required by the requested computation fails
// (wrong exponent range, NDC verdict not the required one, ...).
struct hypothesis_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Weight mini-language syntax error; position is a byte offset into the text.
struct parse_error : std::invalid_argument {
    parse_error(const std::string& msg, std::size_t pos)
        : std::invalid_argument(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
    std::size_t position;
};

} // namespace ckn

#endif
