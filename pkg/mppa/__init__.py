import logging

from flask import Flask

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"


def _configure_logging(level):
    root = logging.getLogger()
    if not any(getattr(h, "_mppa", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._mppa = True
        root.addHandler(handler)
    root.setLevel(level)


def create_app(overrides=None):
    app = Flask(__name__)
    app.config.from_object('config.Config')
    if overrides:
        app.config.update(overrides)

    _configure_logging(app.config['LOG_LEVEL'])

    from mppa.commands.run import run_bp
    app.register_blueprint(run_bp)

    from mppa.commands.bound import bound_bp
    app.register_blueprint(bound_bp)

    from mppa.commands.oracle import oracle_bp
    app.register_blueprint(oracle_bp)

    from mppa.commands.verify import verify_bp
    app.register_blueprint(verify_bp)

    return app
