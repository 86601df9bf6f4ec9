#ifndef COMPKAT_COMPKAT_HPP
#define COMPKAT_COMPKAT_HPP

#include "compkat/counters.hpp"
#include "compkat/estimators.hpp"
#include "compkat/fista.hpp"
#include "compkat/linalg.hpp"
#include "compkat/multilevel.hpp"
#include "compkat/oracle.hpp"
#include "compkat/params.hpp"
#include "compkat/problems/mean_variance.hpp"
#include "compkat/problems/multilevel_linear.hpp"
#include "compkat/problems/synthetic.hpp"
#include "compkat/prox.hpp"
#include "compkat/random.hpp"
#include "compkat/solvers/multilevel_sock.hpp"
#include "compkat/solvers/nock.hpp"
#include "compkat/solvers/sock.hpp"
#include "compkat/solvers/steps.hpp"
#include "compkat/solvers/vrsc_pg.hpp"
#include "compkat/trace.hpp"
#include "compkat/transforms.hpp"

#endif  // COMPKAT_COMPKAT_HPP
