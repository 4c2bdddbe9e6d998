#pragma once

#include "crux/core/error.hpp"
#include "crux/core/metrics.hpp"
#include "crux/core/rng.hpp"
#include "crux/core/text.hpp"
#include "crux/core/types.hpp"
#include "crux/dataset.hpp"
#include "crux/llm/gateway.hpp"
#include "crux/llm/live_provider.hpp"
#include "crux/llm/providers.hpp"
#include "crux/llm/templates.hpp"
#include "crux/pipeline/keyword.hpp"
#include "crux/pipeline/text.hpp"
#include "crux/schema/generator.hpp"
#include "crux/schema/grid.hpp"
#include "crux/schema/oracle.hpp"
#include "crux/schema/score.hpp"
#include "crux/service/puzzle.hpp"
#include "crux/service/server.hpp"
#include "crux/service/service.hpp"
#include "crux/service/session.hpp"
