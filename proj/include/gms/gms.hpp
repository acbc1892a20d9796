#pragma once

// Convenience include for the whole library.

#include "gms/agent_opt.hpp"
#include "gms/domain.hpp"
#include "gms/io.hpp"
#include "gms/lp.hpp"
#include "gms/negotiation.hpp"
#include "gms/scenarios.hpp"
#include "gms/tso_opt.hpp"
