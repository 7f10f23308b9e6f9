module.exports = function (opts) {
  return Object.assign({}, opts);
};