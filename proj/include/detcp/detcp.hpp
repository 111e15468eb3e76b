#ifndef DETCP_DETCP_HPP
#define DETCP_DETCP_HPP

#include "detcp/brute_force.hpp"
#include "detcp/domain_store.hpp"
#include "detcp/fzn.hpp"
#include "detcp/model.hpp"
#include "detcp/parallel.hpp"
#include "detcp/path.hpp"
#include "detcp/propagation.hpp"
#include "detcp/report.hpp"
#include "detcp/search.hpp"
#include "detcp/synthetic.hpp"

#endif  // DETCP_DETCP_HPP
