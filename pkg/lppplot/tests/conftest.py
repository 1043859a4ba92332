import pytest

TAIL_FIXTURE = """#meta kind=exit_tail
#meta rho=0.5
#meta n=512
#meta v=(128,128)
#meta replicates=20000
#meta base_seed=42
#meta experiment_id=exit-tail
#meta rounding=half-up
#meta version=0.1.0
threshold,n_samples,n_exceed,p_hat,ci_lo,ci_hi
0.25,20000,15824,0.7912,0.78547,0.79674
0.5,20000,11235,0.56175,0.55485,0.56862
0.75,20000,6968,0.3484,0.34183,0.35503
1.0,20000,3588,0.1794,0.17414,0.18476
1.25,20000,1262,0.0631,0.05982,0.06655
1.5,20000,222,0.0111,0.00973,0.01266
1.75,20000,6,0.0003,0.00014,0.00065
2.0,20000,0,0.0,0.0,0.00019
#fit kappa_hat=2.6254 c_hat=1.4369 logC_hat=-0.2863 window=[0.25,1.5] rss=0.0031
#fit kappa_ci_lo=2.49 kappa_ci_hi=2.77 kappa_loglog=2.075 method=prefactor ok=1
#fit_model kappa=1.5 c_hat=2.02 logC_hat=0.41 rss=0.17216
#fit_model kappa=3.0 c_hat=1.07 logC_hat=-0.09 rss=0.00423
#fit_excluded threshold=1.75 reason=fewer_than_10_exceedances
#fit_excluded threshold=2.0 reason=zero_exceedances
"""

UPPER_FIXTURE = """#meta kind=upper_tail
#meta rho=0.5
#meta n=512
threshold,n_samples,n_exceed,p_hat,ci_lo,ci_hi
0.5,20000,7300,0.365,0.35835,0.37169
1.0,20000,5270,0.2635,0.25744,0.26963
1.5,20000,3708,0.1854,0.18005,0.19084
2.0,20000,2446,0.1223,0.11781,0.12692
2.5,20000,1585,0.07925,0.07558,0.08309
3.0,20000,960,0.048,0.04512,0.05106
3.5,20000,590,0.0295,0.02725,0.03193
4.0,20000,335,0.01675,0.01506,0.01862
#fit kappa_hat=1.354 c_hat=0.4986 logC_hat=-0.8221 window=[0.5,4.0] rss=0.0092
"""

VARIANCE_FIXTURE = """#meta kind=variance_scaling
#meta rho=0.5
#meta n_grid=256:1024
#meta statistic=characteristic
N,n_samples,var_hat,jk_se
256,10000,101.3,1.9
1024,10000,257.8,4.7
#fit slope_hat=0.6733
"""


@pytest.fixture
def tail_csv(tmp_path):
    p = tmp_path / "exit.csv"
    p.write_text(TAIL_FIXTURE)
    return p


@pytest.fixture
def upper_csv(tmp_path):
    p = tmp_path / "upper.csv"
    p.write_text(UPPER_FIXTURE)
    return p


@pytest.fixture
def variance_csv(tmp_path):
    p = tmp_path / "var.csv"
    p.write_text(VARIANCE_FIXTURE)
    return p
