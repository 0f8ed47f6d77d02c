#include "unlshare/config.hpp"

#include "unlshare/error.hpp"
#include "yaml_util.hpp"

#include <yaml-cpp/yaml.h>

#include <set>
#include <sstream>

namespace unlshare {

namespace detail {

YAML::Node load_yaml(std::string_view text)
{
  try {
    YAML::Node root = YAML::Load(std::string(text));
    if (root.IsNull())
      return YAML::Node(YAML::NodeType::Map);
    if (!root.IsMap())
      throw ConfigError("configuration must be a key/value mapping");
    return root;
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("configuration parse error: ") + e.what());
  }
}

void reject_unknown(const YAML::Node& node, const std::set<std::string>& known, std::string_view section)
{
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key))
      throw ConfigError("unknown key '" + key + "' in section '" + std::string(section) + "'");
  }
}

} // namespace detail

namespace {

template <typename Lookup>
auto from_preset(Lookup lookup, const std::string& name)
{
  try {
    return lookup(name);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

using detail::read;

const std::set<std::string> kWifiKeys = {
    "preset", "sigma", "AIFSN", "SIFS", "DIFS", "CW_min_w", "CW_max_w", "M_w", "BR", "Max_TXOP_w",
    "AMPDU_exp", "N_w", "D_Data", "T_PHY", "T_PHY_response", "D_MPDU", "D_MAC", "D_LLC",
    "D_BlockACK", "ACK_Tout", "beacon_interval", "tail_pad"};

const std::set<std::string> kLaaKeys = {"preset", "class", "sigma", "T_f", "m_l", "CW_min_l",
                                        "CW_max_l", "M_l", "TXOP_l_coexistence", "TXOP_l_sharing",
                                        "T_LAAslot", "LBT_CCA"};

WifiMacProfile wifi_from_node(const YAML::Node& node)
{
  detail::reject_unknown(node, kWifiKeys, "wifi");
  WifiMacProfile p = from_preset(wifi_preset, read<std::string>(node, "preset", "table2-wifi"));
  p.slot_time = read(node, "sigma", p.slot_time);
  p.aifsn = read(node, "AIFSN", p.aifsn);
  p.sifs = read(node, "SIFS", p.sifs);
  p.difs = read(node, "DIFS", p.sifs + p.aifsn * p.slot_time);
  p.cw_min = read(node, "CW_min_w", p.cw_min);
  p.cw_max = read(node, "CW_max_w", p.cw_max);
  p.max_retries = read(node, "M_w", p.max_retries);
  p.basic_rate = read(node, "BR", p.basic_rate);
  p.max_ppdu_duration = read(node, "Max_TXOP_w", p.max_ppdu_duration);
  p.ampdu_exp = read(node, "AMPDU_exp", p.ampdu_exp);
  p.max_mpdus = read(node, "N_w", p.max_mpdus);
  p.payload_bytes = read(node, "D_Data", p.payload_bytes);
  p.phy_header_time = read(node, "T_PHY", p.phy_header_time);
  p.response_phy_header_time = read(node, "T_PHY_response", p.response_phy_header_time);
  p.delimiter_bytes = read(node, "D_MPDU", p.delimiter_bytes);
  p.mac_header_bytes = read(node, "D_MAC", p.mac_header_bytes);
  p.llc_header_bytes = read(node, "D_LLC", p.llc_header_bytes);
  p.block_ack_bytes = read(node, "D_BlockACK", p.block_ack_bytes);
  p.ack_timeout = read(node, "ACK_Tout", p.ack_timeout);
  p.beacon_interval = read(node, "beacon_interval", p.beacon_interval);
  const auto pad = read<std::string>(node, "tail_pad", to_string(p.tail_pad));
  if (pad == "none")
    p.tail_pad = TailPad::None;
  else if (pad == "symbol")
    p.tail_pad = TailPad::SymbolAligned;
  else
    throw ConfigError("tail_pad must be 'none' or 'symbol'");
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

LaaClassProfile laa_from_node(const YAML::Node& node)
{
  detail::reject_unknown(node, kLaaKeys, "laa");
  LaaClassProfile p = from_preset(laa_preset, read<std::string>(node, "preset", "table4-class1"));
  p.priority_class = read(node, "class", p.priority_class);
  p.slot_time = read(node, "sigma", p.slot_time);
  p.defer_base = read(node, "T_f", p.defer_base);
  p.defer_slots = read(node, "m_l", p.defer_slots);
  p.cw_min = read(node, "CW_min_l", p.cw_min);
  p.cw_max = read(node, "CW_max_l", p.cw_max);
  p.max_retries = read(node, "M_l", p.max_retries);
  p.txop_coexistence = read(node, "TXOP_l_coexistence", p.txop_coexistence);
  p.txop_exclusive = read(node, "TXOP_l_sharing", p.txop_exclusive);
  p.laa_slot = read(node, "T_LAAslot", p.laa_slot);
  p.gamma = p.laa_slot / 2.0;
  const auto cca = read<std::string>(node, "LBT_CCA", to_string(p.multichannel_cca));
  if (cca == "A1")
    p.multichannel_cca = MultichannelCca::TypeA1;
  else if (cca == "A2")
    p.multichannel_cca = MultichannelCca::TypeA2;
  else if (cca == "B")
    p.multichannel_cca = MultichannelCca::TypeB;
  else
    throw ConfigError("LBT_CCA must be A1, A2 or B");
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

} // namespace

namespace detail {

WifiMacProfile wifi_from_yaml(const YAML::Node& node)
{
  return wifi_from_node(node);
}

LaaClassProfile laa_from_yaml(const YAML::Node& node)
{
  return laa_from_node(node);
}

} // namespace detail

ProfileSet parse_profiles(std::string_view text)
{
  const YAML::Node root = detail::load_yaml(text);
  detail::reject_unknown(root, {"wifi", "laa"}, "<root>");
  ProfileSet set;
  if (root["wifi"])
    set.wifi = wifi_from_node(root["wifi"]);
  if (root["laa"])
    set.laa = laa_from_node(root["laa"]);
  return set;
}

WifiMacProfile parse_wifi_profile(std::string_view text)
{
  return wifi_from_node(detail::load_yaml(text));
}

LaaClassProfile parse_laa_profile(std::string_view text)
{
  return laa_from_node(detail::load_yaml(text));
}

namespace {

YAML::Node wifi_to_node(const WifiMacProfile& p)
{
  YAML::Node n;
  n["sigma"] = p.slot_time;
  n["AIFSN"] = p.aifsn;
  n["SIFS"] = p.sifs;
  n["DIFS"] = p.difs;
  n["CW_min_w"] = p.cw_min;
  n["CW_max_w"] = p.cw_max;
  n["M_w"] = p.max_retries;
  n["BR"] = p.basic_rate;
  n["Max_TXOP_w"] = p.max_ppdu_duration;
  n["AMPDU_exp"] = p.ampdu_exp;
  n["N_w"] = p.max_mpdus;
  n["D_Data"] = p.payload_bytes;
  n["T_PHY"] = p.phy_header_time;
  n["T_PHY_response"] = p.response_phy_header_time;
  n["D_MPDU"] = p.delimiter_bytes;
  n["D_MAC"] = p.mac_header_bytes;
  n["D_LLC"] = p.llc_header_bytes;
  n["D_BlockACK"] = p.block_ack_bytes;
  n["ACK_Tout"] = p.ack_timeout;
  n["beacon_interval"] = p.beacon_interval;
  n["tail_pad"] = to_string(p.tail_pad);
  return n;
}

YAML::Node laa_to_node(const LaaClassProfile& p)
{
  YAML::Node n;
  n["class"] = p.priority_class;
  n["sigma"] = p.slot_time;
  n["T_f"] = p.defer_base;
  n["m_l"] = p.defer_slots;
  n["CW_min_l"] = p.cw_min;
  n["CW_max_l"] = p.cw_max;
  n["M_l"] = p.max_retries;
  n["TXOP_l_coexistence"] = p.txop_coexistence;
  n["TXOP_l_sharing"] = p.txop_exclusive;
  n["T_LAAslot"] = p.laa_slot;
  n["LBT_CCA"] = to_string(p.multichannel_cca);
  return n;
}

std::string emit(const YAML::Node& node)
{
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << node;
  return std::string(out.c_str()) + "\n";
}

} // namespace

std::string to_config_text(const WifiMacProfile& profile)
{
  return emit(wifi_to_node(profile));
}

std::string to_config_text(const LaaClassProfile& profile)
{
  return emit(laa_to_node(profile));
}

std::string to_config_text(const ProfileSet& profiles)
{
  YAML::Node root;
  root["wifi"] = wifi_to_node(profiles.wifi);
  root["laa"] = laa_to_node(profiles.laa);
  return emit(root);
}

} // namespace unlshare
