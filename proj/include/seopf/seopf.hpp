#pragma once

#include "seopf/ac_network.hpp"
#include "seopf/builtin_cases.hpp"
#include "seopf/case_io.hpp"
#include "seopf/case_model.hpp"
#include "seopf/cli.hpp"
#include "seopf/formulation.hpp"
#include "seopf/harness.hpp"
#include "seopf/nlp.hpp"
#include "seopf/report_io.hpp"
#include "seopf/solver/copper_plate.hpp"
#include "seopf/solver/derivative_audit.hpp"
#include "seopf/solver/interior_point.hpp"
#include "seopf/solver/kkt_check.hpp"
#include "seopf/welfare.hpp"
