import os  # 환경 변수를 사용


class Config:

    # bound evaluator limits; when set they override [run] budget_bits / budget_calls
    BUDGET_BITS = os.environ.get('PPA_BUDGET_BITS')
    BUDGET_CALLS = os.environ.get('PPA_BUDGET_CALLS')

    # identity checks (resolvent identity, recurrence, ineqJc) and inequality slack
    IDENTITY_TOL = float(os.environ.get('PPA_IDENTITY_TOL') or 1e-8)
    INEQUALITY_SLACK = float(os.environ.get('PPA_INEQUALITY_SLACK') or 1e-9)

    MAX_HORIZON = int(os.environ.get('PPA_MAX_HORIZON') or 1_000_000)
    OUTPUT_DIR = os.environ.get('PPA_OUTPUT_DIR') or 'out'
    LOG_LEVEL = os.environ.get('PPA_LOG_LEVEL') or 'INFO'
    ORACLE_SEED = int(os.environ.get('PPA_ORACLE_SEED') or 7)
