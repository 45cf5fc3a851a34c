#ifndef CPID_TEXT_HPP_
#define CPID_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace cpid {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace cpid

#endif  // CPID_TEXT_HPP_
