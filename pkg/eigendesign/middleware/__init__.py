from eigendesign.middleware.error_handler import handle_exception
