const el = <App title="x" />;
render(el);