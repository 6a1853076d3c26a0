#ifndef CKN_VERSION_HPP
#define CKN_VERSION_HPP

namespace ckn {

inline constexpr const char* version_string = "ckn-verify 0.1.0";
inline constexpr int report_schema = 1;

} // namespace ckn

#endif
